"""The visualization-perception-action loop.

Each iteration renders the current frame (visualize), attaches it — or a
textual scene digest for visionless models — to the conversation (perceive),
asks the planner for tool calls (act), executes them, and stops when the
planner reports the goal met or the iteration cap is reached. Tool and
command failures are fed back into the conversation instead of aborting:
the next iteration is the correction mechanism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

from splatlab.agents.messages import (
    AgentMessage,
    AssistantTurn,
    MEMORY_CAP_DEFAULT,
    PERCEPTION_PREFIX,
    ROLE_ASSISTANT,
    ROLE_SYSTEM,
    ROLE_TOOL,
    ROLE_USER,
    ToolCall,
    trim_memory,
)
from splatlab.agents.tools import (
    BEST_VIEW,
    KNOWLEDGE_QA,
    OPEN_VOCAB_QUERY,
    SCENE_EDIT,
    STYLIZE_2D,
    ToolError,
    ToolRegistry,
    dispatch_tool,
)
from splatlab.commands import Command, execute_command, serialize_command
from splatlab.errors import PlanningError, ProviderError, ProviderTimeoutError
from splatlab.semantic.providers import EmbeddingProvider
from splatlab.session import SessionState

MAX_ITERATIONS_DEFAULT = 3
PERCEPTION_FRAME_SIZE = 512  # frames are downscaled before provider attachment

SYSTEM_PROMPT = (
    "You are the core planning agent of an interactive splat-scene studio. "
    "You can query components by open-vocabulary description, edit color, "
    "opacity, visibility, lighting and camera through declarative commands, "
    "answer questions from the scene's knowledge notes, move to the most "
    "informative view of a component, and apply 2D stylization. Resolve "
    "vague references with the query tool before editing. After acting, "
    "check the rendered result and issue corrections if the goal is not met."
)

# dependency order: resolve references first, apply edits second,
# re-perceive (stylize reads the rendered result) last
_TOOL_RANK = {
    OPEN_VOCAB_QUERY: 0,
    KNOWLEDGE_QA: 0,
    SCENE_EDIT: 1,
    BEST_VIEW: 1,
    STYLIZE_2D: 2,
}


class ChatProvider(Protocol):
    vision_capable: bool

    def complete(self, messages: Sequence[AgentMessage], tools: Sequence = ()) -> AssistantTurn:
        ...


@dataclass
class VpaState:
    iteration: int = 0
    max_iterations: int = MAX_ITERATIONS_DEFAULT
    goal_met: bool = False
    pending_commands: list[Command] = field(default_factory=list)


@dataclass
class VpaOutcome:
    reply: str
    executed_commands: list[str]  # canonical serializations, execution order
    iterations: int
    completed: bool
    aborted: bool = False
    error: str | None = None


def route_hierarchy(tool_calls: Sequence[ToolCall]) -> list[ToolCall]:
    """Order tool calls so queries resolve before edits and stylization runs
    after edits; unknown tools are a planning error."""
    for call in tool_calls:
        if call.name not in _TOOL_RANK:
            raise PlanningError(f"plan references unknown tool {call.name!r}")
    return sorted(tool_calls, key=lambda c: _TOOL_RANK[c.name])


def _noop(*_args, **_kwargs):
    return None


def run_vpa_loop(
    session: SessionState,
    utterance: str,
    chat_provider: ChatProvider,
    embedding_provider: EmbeddingProvider,
    registry: ToolRegistry | None = None,
    max_iterations: int = MAX_ITERATIONS_DEFAULT,
    memory_cap: int = MEMORY_CAP_DEFAULT,
    on_token: Callable[[str], None] | None = None,
    on_frame: Callable[[], None] | None = None,
    on_status: Callable[[str], None] | None = None,
) -> VpaOutcome:
    """Drive one user utterance through the loop; returns the final reply,
    executed commands (canonical form) and the number of iterations used."""
    registry = registry or ToolRegistry()
    on_token = on_token or _noop
    on_frame = on_frame or _noop
    on_status = on_status or _noop

    history = session.agent_history
    if not any(m.role == ROLE_SYSTEM for m in history):
        history.insert(0, AgentMessage(ROLE_SYSTEM, SYSTEM_PROMPT))
    history.append(AgentMessage(ROLE_USER, utterance))

    state = VpaState(max_iterations=max_iterations)
    outcome = VpaOutcome(reply="", executed_commands=[], iterations=0, completed=False)
    reply_parts: list[str] = []

    while state.iteration < state.max_iterations:
        state.iteration += 1
        outcome.iterations = state.iteration
        on_status("processing")

        # visualize + perceive
        frame = session.displayed_frame()
        if chat_provider.vision_capable:
            size = min(PERCEPTION_FRAME_SIZE, max(frame.width, frame.height))
            perception = AgentMessage(
                ROLE_USER,
                PERCEPTION_PREFIX + " current rendered frame attached",
                frame=frame.resized(size, size),
            )
        else:
            perception = AgentMessage(
                ROLE_USER, PERCEPTION_PREFIX + "\n" + session.scene_digest()
            )

        # act
        try:
            turn = chat_provider.complete(list(history) + [perception], registry.specs)
        except ProviderTimeoutError as exc:
            outcome.aborted = True
            outcome.error = f"provider timeout: {exc}"
            break
        except ProviderError as exc:
            outcome.aborted = True
            outcome.error = f"provider failure: {exc}"
            break

        if turn.content:
            reply_parts.append(turn.content)
            session.log_agent_reply(turn.content)
            for token in turn.content.split(" "):
                on_token(token + " ")
        history.append(AgentMessage(ROLE_ASSISTANT, turn.content, tool_calls=turn.tool_calls))

        if turn.tool_calls:
            try:
                ordered = route_hierarchy(turn.tool_calls)
            except PlanningError as exc:
                history.append(
                    AgentMessage(ROLE_TOOL, f"planning error: {exc}",
                                 tool_call_id=turn.tool_calls[0].id)
                )
                continue
            any_dirty = False
            for call in ordered:
                try:
                    result = dispatch_tool(
                        call.name, call.arguments, session, embedding_provider,
                        registry, tool_call_id=call.id,
                    )
                except ToolError as exc:
                    session.log_tool_call(call.name, str(exc), tool_call_id=call.id)
                    history.append(
                        AgentMessage(ROLE_TOOL, f"tool error: {exc}", tool_call_id=call.id)
                    )
                    continue
                session.log_tool_call(
                    call.name, result.text, tool_call_id=call.id, detail=call.name
                )
                texts = [result.text]
                for command in result.commands:
                    state.pending_commands.append(command)
                    cmd_result = execute_command(command, session)
                    if cmd_result.ok:
                        outcome.executed_commands.append(serialize_command(command))
                        any_dirty = any_dirty or cmd_result.frame_dirty
                    else:
                        texts.append(
                            f"command {serialize_command(command)} "
                            f"{cmd_result.status}: {cmd_result.detail}"
                        )
                history.append(
                    AgentMessage(ROLE_TOOL, "\n".join(texts), tool_call_id=call.id)
                )
            if any_dirty:
                on_frame()

        if turn.done:
            state.goal_met = True
            outcome.completed = True
            break

    outcome.reply = "\n".join(p for p in reply_parts if p)
    session.agent_history = trim_memory(history, memory_cap)
    on_status("idle")
    return outcome


__all__ = [
    "ChatProvider",
    "MAX_ITERATIONS_DEFAULT",
    "PERCEPTION_FRAME_SIZE",
    "SYSTEM_PROMPT",
    "VpaOutcome",
    "VpaState",
    "route_hierarchy",
    "run_vpa_loop",
]
