"""Function-calling tool registry and dispatch.

Five tools are registered: open-vocabulary object querying, scene editing,
knowledge-based question answering, best-view selection, and 2D stylization.
Dispatch validates arguments against each tool's schema and never raises
into the agent loop; problems surface as :class:`ToolError` text fed back
to the planner.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from splatlab.commands import (
    BestView,
    Command,
    command_from_payload,
    serialize_command,
    validate_command,
    Stylize,
)
from splatlab.errors import CommandError, SplatlabError
from splatlab.semantic.index import query_components
from splatlab.semantic.providers import EmbeddingProvider
from splatlab.session import SessionState


class ToolError(SplatlabError):
    """Tool-level failure reported back to the agent as a tool message."""


@dataclass(frozen=True)
class ToolSpec:
    name: str
    description: str
    parameters: dict  # JSON-schema style {"type": "object", "properties": ..., "required": ...}


OPEN_VOCAB_QUERY = "open_vocab_query"
SCENE_EDIT = "scene_edit"
KNOWLEDGE_QA = "knowledge_qa"
BEST_VIEW = "best_view"
STYLIZE_2D = "stylize_2d"

DEFAULT_TOOL_SPECS: tuple[ToolSpec, ...] = (
    ToolSpec(
        OPEN_VOCAB_QUERY,
        "Rank every scene component by embedding similarity to a free-form "
        "description. Returns all components with scores; decide relevance yourself.",
        {
            "type": "object",
            "properties": {"query": {"type": "string"}},
            "required": ["query"],
        },
    ),
    ToolSpec(
        SCENE_EDIT,
        "Execute declarative scene commands (JSON objects with a 'cmd' field): "
        "color, opacity, visibility, lighting, camera, background, render mode, "
        "save, reset, annotate.",
        {
            "type": "object",
            "properties": {"commands": {"type": "array", "items": {"type": "object"}}},
            "required": ["commands"],
        },
    ),
    ToolSpec(
        KNOWLEDGE_QA,
        "Look up dataset-specific notes attached to the scene to answer "
        "domain questions.",
        {
            "type": "object",
            "properties": {"question": {"type": "string"}},
            "required": ["question"],
        },
    ),
    ToolSpec(
        BEST_VIEW,
        "Move the camera to the most informative view of a component "
        "(highest alpha-channel entropy).",
        {
            "type": "object",
            "properties": {"component": {"type": "string"}},
            "required": ["component"],
        },
    ),
    ToolSpec(
        STYLIZE_2D,
        "Apply a prompt-driven 2D stylization to a component or the whole scene.",
        {
            "type": "object",
            "properties": {"target": {"type": "string"}, "prompt": {"type": "string"}},
            "required": ["target", "prompt"],
        },
    ),
)

_JSON_TYPES = {
    "string": str,
    "number": (int, float),
    "boolean": bool,
    "array": list,
    "object": dict,
}


@dataclass
class ToolRegistry:
    specs: tuple[ToolSpec, ...] = DEFAULT_TOOL_SPECS
    _by_name: dict = field(init=False)

    def __post_init__(self):
        names = [s.name for s in self.specs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate tool names: {names}")
        self._by_name = {s.name: s for s in self.specs}

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def spec(self, name: str) -> ToolSpec:
        return self._by_name[name]

    def names(self) -> tuple[str, ...]:
        return tuple(self._by_name)

    def validate_arguments(self, name: str, arguments: dict) -> list[str]:
        problems = []
        spec = self._by_name[name]
        props = spec.parameters.get("properties", {})
        for required in spec.parameters.get("required", []):
            if required not in arguments:
                problems.append(f"missing required argument {required!r}")
        for key, value in arguments.items():
            if key not in props:
                problems.append(f"unknown argument {key!r}")
                continue
            expected = _JSON_TYPES.get(props[key].get("type"))
            if expected is not None:
                if isinstance(value, bool) and expected is not bool:
                    problems.append(f"argument {key!r} must be {props[key]['type']}")
                elif not isinstance(value, expected):
                    problems.append(f"argument {key!r} must be {props[key]['type']}")
        return problems


@dataclass(frozen=True)
class ToolOutcome:
    text: str
    commands: tuple[Command, ...] = ()


def format_ranking(ranking: list[tuple[str, float]], labels: dict[str, str]) -> str:
    lines = ["similarity ranking:"]
    for cid, score in ranking:
        label = labels.get(cid, "")
        lines.append(f"- {cid}{f' ({label})' if label and label != cid else ''}: {score:.4f}")
    return "\n".join(lines)


def dispatch_tool(
    name: str,
    arguments: dict,
    session: SessionState,
    embedding_provider: EmbeddingProvider,
    registry: ToolRegistry | None = None,
    tool_call_id: str | None = None,
) -> ToolOutcome:
    """Run one tool call against the session; raises :class:`ToolError` on
    any argument/validation problem (callers feed the text back to the agent)."""
    registry = registry or ToolRegistry()
    if name not in registry:
        raise ToolError(f"unknown tool {name!r}; registered tools: {registry.names()}")
    problems = registry.validate_arguments(name, arguments)
    if problems:
        raise ToolError(f"invalid arguments for {name}: " + "; ".join(problems))

    if name == OPEN_VOCAB_QUERY:
        index = session.semantic_index(embedding_provider)
        ranking = query_components(index, arguments["query"], embedding_provider)
        session.log_query_result(arguments["query"], ranking, tool_call_id=tool_call_id)
        return ToolOutcome(format_ranking(ranking, session.bundle.component_labels()))

    if name == SCENE_EDIT:
        commands: list[Command] = []
        for i, payload in enumerate(arguments["commands"]):
            try:
                command = command_from_payload(payload)
            except CommandError as exc:
                raise ToolError(f"command {i}: {exc}") from exc
            rejections = validate_command(command, session.scene)
            if rejections:
                reasons = "; ".join(f"{r.code}({r.field}): {r.message}" for r in rejections)
                raise ToolError(f"command {i} ({serialize_command(command)}): {reasons}")
            commands.append(command)
        plural = "s" if len(commands) != 1 else ""
        return ToolOutcome(f"validated {len(commands)} command{plural}", tuple(commands))

    if name == KNOWLEDGE_QA:
        hits = session.bundle.knowledge.search(arguments["question"])
        if not hits:
            return ToolOutcome("no knowledge entries match the question")
        return ToolOutcome("\n".join(f"{e.title}: {e.body}" for e in hits))

    if name == BEST_VIEW:
        return ToolOutcome(
            f"moving camera to the best view of {arguments['component']!r}",
            (BestView(component=arguments["component"]),),
        )

    if name == STYLIZE_2D:
        return ToolOutcome(
            f"stylizing {arguments['target']!r}",
            (Stylize(target=arguments["target"], prompt=arguments["prompt"]),),
        )

    raise ToolError(f"tool {name!r} has no dispatcher")


__all__ = [
    "BEST_VIEW",
    "DEFAULT_TOOL_SPECS",
    "KNOWLEDGE_QA",
    "OPEN_VOCAB_QUERY",
    "SCENE_EDIT",
    "STYLIZE_2D",
    "ToolError",
    "ToolOutcome",
    "ToolRegistry",
    "ToolSpec",
    "dispatch_tool",
    "format_ranking",
]
