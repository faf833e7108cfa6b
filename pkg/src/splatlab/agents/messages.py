"""Conversation message types and bounded-memory trimming."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

from splatlab.render.image import ImageRGBA

ROLE_USER = "user"
ROLE_ASSISTANT = "assistant"
ROLE_TOOL = "tool"
ROLE_SYSTEM = "system"

MEMORY_CAP_DEFAULT = 10  # user messages kept in the rolling window

# prefix of the ephemeral context message carrying the rendered frame or the
# textual scene digest; it is injected per completion and never stored
PERCEPTION_PREFIX = "[perception]"


@dataclass(frozen=True)
class ToolCall:
    id: str
    name: str
    arguments: dict


@dataclass(frozen=True)
class AgentMessage:
    role: str
    content: str
    frame: ImageRGBA | None = None
    tool_calls: tuple[ToolCall, ...] = ()
    tool_call_id: str | None = None  # set on role == "tool" replies
    timestamp: float = field(default_factory=time.time)


@dataclass(frozen=True)
class AssistantTurn:
    """One provider completion: reply text, requested tool calls, and whether
    the provider considers the goal met."""

    content: str
    tool_calls: tuple[ToolCall, ...] = ()
    done: bool = False


def trim_memory(
    history: Sequence[AgentMessage], max_user_messages: int = MEMORY_CAP_DEFAULT
) -> list[AgentMessage]:
    """Deque-style history bound: drop the oldest user turns first.

    A "turn" is a user message plus the assistant/tool messages that follow
    it; whole turns are evicted together so tool replies never dangle. The
    pinned prefix (system prompt and anything before the first user message)
    is never dropped. Message order is preserved.
    """
    if max_user_messages < 1:
        raise ValueError("max_user_messages must be >= 1")
    messages = list(history)
    first_user = next((i for i, m in enumerate(messages) if m.role == ROLE_USER), None)
    if first_user is None:
        return messages
    prefix, rest = messages[:first_user], messages[first_user:]
    turns: list[list[AgentMessage]] = []
    for message in rest:
        if message.role == ROLE_USER:
            turns.append([message])
        else:
            turns[-1].append(message)
    while len(turns) > max_user_messages:
        turns.pop(0)
    return prefix + [m for turn in turns for m in turn]


def user_message_count(history: Sequence[AgentMessage]) -> int:
    return sum(1 for m in history if m.role == ROLE_USER)


__all__ = [
    "AgentMessage",
    "PERCEPTION_PREFIX",
    "AssistantTurn",
    "MEMORY_CAP_DEFAULT",
    "ROLE_ASSISTANT",
    "ROLE_SYSTEM",
    "ROLE_TOOL",
    "ROLE_USER",
    "ToolCall",
    "trim_memory",
    "user_message_count",
]
