from splatlab.agents.messages import (
    AgentMessage,
    AssistantTurn,
    MEMORY_CAP_DEFAULT,
    ToolCall,
    trim_memory,
    user_message_count,
)
from splatlab.agents.providers import (
    RemoteChatProvider,
    Scenario,
    ScenarioTurn,
    ScriptedChatProvider,
)
from splatlab.agents.runtime import (
    ChatProvider,
    MAX_ITERATIONS_DEFAULT,
    VpaOutcome,
    VpaState,
    route_hierarchy,
    run_vpa_loop,
)
from splatlab.agents.stylize import RemoteStylizationProvider, StubStylizationProvider
from splatlab.agents.tools import (
    ToolError,
    ToolOutcome,
    ToolRegistry,
    ToolSpec,
    dispatch_tool,
)

__all__ = [
    "AgentMessage",
    "AssistantTurn",
    "ChatProvider",
    "MAX_ITERATIONS_DEFAULT",
    "MEMORY_CAP_DEFAULT",
    "RemoteChatProvider",
    "RemoteStylizationProvider",
    "Scenario",
    "ScenarioTurn",
    "ScriptedChatProvider",
    "StubStylizationProvider",
    "ToolCall",
    "ToolError",
    "ToolOutcome",
    "ToolRegistry",
    "ToolSpec",
    "VpaOutcome",
    "VpaState",
    "dispatch_tool",
    "route_hierarchy",
    "run_vpa_loop",
    "trim_memory",
    "user_message_count",
]
