"""Chat-completion providers: a scripted deterministic provider for tests and
an OpenAI-compatible HTTP client for real models.

Scripted scenario files map utterance patterns to per-iteration tool-call
scripts::

    {
      "scenarios": [
        {
          "pattern": "pectoral fin",
          "turns": [
            {
              "message": "Highlighting the pectoral fin.",
              "tool_calls": [
                {"name": "open_vocab_query", "arguments": {"query": "pectoral fin"}}
              ],
              "done": false
            },
            {"message": "Done.", "tool_calls": [], "done": true}
          ]
        }
      ],
      "default": {"message": "I can query, edit, and restyle the scene.", "done": true}
    }

The provider is stateless: the turn index is derived from how many assistant
messages follow the latest user message, so identical conversations always
replay identically.
"""

from __future__ import annotations

import base64
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from splatlab.agents.messages import (
    AgentMessage,
    AssistantTurn,
    PERCEPTION_PREFIX,
    ROLE_ASSISTANT,
    ROLE_TOOL,
    ROLE_USER,
    ToolCall,
)
from splatlab.errors import ProviderError, ProviderTimeoutError
from splatlab.render.image import encode_png


@dataclass(frozen=True)
class ScenarioTurn:
    message: str
    tool_calls: tuple[ToolCall, ...] = ()
    done: bool = True


@dataclass(frozen=True)
class Scenario:
    pattern: str  # case-insensitive substring of the user utterance
    turns: tuple[ScenarioTurn, ...]


class ScriptedChatProvider:
    """Deterministic provider driven by a scenario table.

    When a conversation outlives its script the last turn repeats, which is
    also how a never-done adversary is written: a single turn with
    ``"done": false``.
    """

    def __init__(
        self,
        scenarios: Sequence[Scenario],
        default: ScenarioTurn | None = None,
        vision_capable: bool = True,
    ):
        self.scenarios = tuple(scenarios)
        self.default = default or ScenarioTurn("Nothing matched my script.", (), True)
        self.vision_capable = vision_capable
        self._counter = 0

    @classmethod
    def from_dict(cls, data: dict, vision_capable: bool | None = None) -> "ScriptedChatProvider":
        def parse_turn(turn: dict, index: int) -> ScenarioTurn:
            calls = tuple(
                ToolCall(
                    id=c.get("id", f"call_{index}_{i}"),
                    name=c["name"],
                    arguments=c.get("arguments", {}),
                )
                for i, c in enumerate(turn.get("tool_calls", []))
            )
            return ScenarioTurn(turn.get("message", ""), calls, bool(turn.get("done", True)))

        scenarios = [
            Scenario(
                pattern=s["pattern"],
                turns=tuple(parse_turn(t, i) for i, t in enumerate(s.get("turns", []))),
            )
            for s in data.get("scenarios", [])
        ]
        default = parse_turn(data["default"], 0) if "default" in data else None
        if vision_capable is None:
            vision_capable = bool(data.get("vision_capable", True))
        return cls(scenarios, default, vision_capable)

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedChatProvider":
        return cls.from_dict(json.loads(Path(path).read_text("utf-8")))

    def complete(
        self, messages: Sequence[AgentMessage], tools: Sequence = ()
    ) -> AssistantTurn:
        last_user = None
        assistant_since = 0
        for message in messages:
            if message.role == ROLE_USER and not message.content.startswith(PERCEPTION_PREFIX):
                last_user = message
                assistant_since = 0
            elif message.role == ROLE_ASSISTANT:
                assistant_since += 1
        if last_user is None:
            return AssistantTurn(self.default.message, self.default.tool_calls, self.default.done)
        utterance = last_user.content.lower()
        turn = self.default
        for scenario in self.scenarios:
            if scenario.pattern.lower() in utterance and scenario.turns:
                turn = scenario.turns[min(assistant_since, len(scenario.turns) - 1)]
                break
        self._counter += 1
        calls = tuple(
            ToolCall(f"{c.id}_{self._counter}", c.name, c.arguments) for c in turn.tool_calls
        )
        return AssistantTurn(turn.message, calls, turn.done)


class RemoteChatProvider:
    """OpenAI-style chat-completions client.

    Frames attach as data-URI image parts when the model is vision capable;
    ``done`` is inferred as "no tool calls requested". Credentials come from
    the environment, never from configuration files.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        vision_capable: bool = False,
        timeout: float = 60.0,
        api_key_env: str = "SPLATLAB_API_KEY",
    ):
        self.endpoint = endpoint
        self.model = model
        self.vision_capable = vision_capable
        self.timeout = timeout
        self.api_key = os.environ.get(api_key_env, "")

    def _payload_message(self, message: AgentMessage) -> dict:
        if message.role == ROLE_TOOL:
            return {
                "role": "tool",
                "tool_call_id": message.tool_call_id,
                "content": message.content,
            }
        if message.role == ROLE_ASSISTANT and message.tool_calls:
            return {
                "role": "assistant",
                "content": message.content or None,
                "tool_calls": [
                    {
                        "id": c.id,
                        "type": "function",
                        "function": {"name": c.name, "arguments": json.dumps(c.arguments)},
                    }
                    for c in message.tool_calls
                ],
            }
        if message.frame is not None and self.vision_capable:
            encoded = base64.b64encode(encode_png(message.frame)).decode("ascii")
            return {
                "role": message.role,
                "content": [
                    {"type": "text", "text": message.content},
                    {
                        "type": "image_url",
                        "image_url": {"url": f"data:image/png;base64,{encoded}"},
                    },
                ],
            }
        return {"role": message.role, "content": message.content}

    def complete(self, messages: Sequence[AgentMessage], tools: Sequence = ()) -> AssistantTurn:
        import httpx

        payload = {
            "model": self.model,
            "messages": [self._payload_message(m) for m in messages],
        }
        if tools:
            payload["tools"] = [
                {
                    "type": "function",
                    "function": {
                        "name": t.name,
                        "description": t.description,
                        "parameters": t.parameters,
                    },
                }
                for t in tools
            ]
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        try:
            response = httpx.post(
                self.endpoint, json=payload, headers=headers, timeout=self.timeout
            )
            response.raise_for_status()
            data = response.json()
        except httpx.TimeoutException as exc:
            raise ProviderTimeoutError(f"chat endpoint timed out: {exc}") from exc
        except Exception as exc:
            raise ProviderError(f"chat endpoint failed: {exc}") from exc
        try:
            message = data["choices"][0]["message"]
            calls = tuple(
                ToolCall(
                    id=c["id"],
                    name=c["function"]["name"],
                    arguments=json.loads(c["function"]["arguments"] or "{}"),
                )
                for c in message.get("tool_calls") or ()
            )
            return AssistantTurn(
                content=message.get("content") or "",
                tool_calls=calls,
                done=not calls,
            )
        except (KeyError, IndexError, json.JSONDecodeError) as exc:
            raise ProviderError(f"malformed chat completion response: {exc}") from exc


__all__ = [
    "RemoteChatProvider",
    "Scenario",
    "ScenarioTurn",
    "ScriptedChatProvider",
]
