"""Declarative scene-command grammar: parse, validate, serialize, execute.

Wire format is one JSON object per command with a ``cmd`` discriminator,
newline-delimited on streaming channels. Parsing is strict: unknown fields
and unknown commands are rejected rather than ignored, because the main
producers are language-model agents and a silently dropped typo turns into
a mismatched visualization nobody can explain.

Parsing checks structure and types only; ranges and component references
are checked by :func:`validate_command` against live scene state, and
:func:`execute_command` applies a validated command atomically to a session.
Component references accept an exact component id or an exact label; fuzzy
resolution belongs to the open-vocabulary query tool, never the parser.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields as dataclass_fields
from typing import TYPE_CHECKING, Union

from splatlab.core.types import ComponentEdit, ComposedScene, LightMode, LightState
from splatlab.errors import (
    CommandFieldError,
    CommandSyntaxError,
    UnknownCommandError,
)
from splatlab.render.camera import camera_spherical, orbit_camera
from splatlab.render.rasterizer import RenderMode

if TYPE_CHECKING:  # session is duck-typed at runtime to avoid an import cycle
    from splatlab.session import SessionState

RESET_TARGETS = ("all", "camera", "light", "background", "edits")
GLOBAL_TARGET = "all"


@dataclass(frozen=True)
class SetColor:
    component: str
    rgb: tuple[float, float, float]


@dataclass(frozen=True)
class SetOpacity:
    component: str
    scale: float


@dataclass(frozen=True)
class SetVisibility:
    component: str
    visible: bool


@dataclass(frozen=True)
class SetLighting:
    target: str
    gains: tuple[float, float, float, float] | None = None
    magnitude: float | None = None


@dataclass(frozen=True)
class SetLightDirection:
    azimuth: float
    polar: float
    mode: str | None = None


@dataclass(frozen=True)
class SetCamera:
    azimuth: float | None = None
    polar: float | None = None
    distance: float | None = None
    fov: float | None = None
    target_point: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class BestView:
    component: str


@dataclass(frozen=True)
class SetBackground:
    rgb: tuple[float, float, float]


@dataclass(frozen=True)
class SetRenderMode:
    mode: str


@dataclass(frozen=True)
class SaveImage:
    path: str


@dataclass(frozen=True)
class Reset:
    target: str


@dataclass(frozen=True)
class Stylize:
    target: str
    prompt: str


@dataclass(frozen=True)
class Annotate:
    component: str
    label_text: str


Command = Union[
    SetColor, SetOpacity, SetVisibility, SetLighting, SetLightDirection, SetCamera,
    BestView, SetBackground, SetRenderMode, SaveImage, Reset, Stylize, Annotate,
]

_COMMAND_TYPES: dict[str, type] = {
    "set_color": SetColor,
    "set_opacity": SetOpacity,
    "set_visibility": SetVisibility,
    "set_lighting": SetLighting,
    "set_light_direction": SetLightDirection,
    "set_camera": SetCamera,
    "best_view": BestView,
    "set_background": SetBackground,
    "set_render_mode": SetRenderMode,
    "save_image": SaveImage,
    "reset": Reset,
    "stylize": Stylize,
    "annotate": Annotate,
}
COMMAND_NAMES = tuple(sorted(_COMMAND_TYPES))
_TYPE_NAMES = {cls: name for name, cls in _COMMAND_TYPES.items()}

# field name -> coercion kind, per command type
_FIELD_KINDS: dict[type, dict[str, str]] = {
    SetColor: {"component": "str", "rgb": "vec3"},
    SetOpacity: {"component": "str", "scale": "float"},
    SetVisibility: {"component": "str", "visible": "bool"},
    SetLighting: {"target": "str", "gains": "vec4?", "magnitude": "float?"},
    SetLightDirection: {"azimuth": "float", "polar": "float", "mode": "str?"},
    SetCamera: {
        "azimuth": "float?", "polar": "float?", "distance": "float?",
        "fov": "float?", "target_point": "vec3?",
    },
    BestView: {"component": "str"},
    SetBackground: {"rgb": "vec3"},
    SetRenderMode: {"mode": "str"},
    SaveImage: {"path": "str"},
    Reset: {"target": "str"},
    Stylize: {"target": "str", "prompt": "str"},
    Annotate: {"component": "str", "label_text": "str"},
}

FRAME_DIRTY: dict[type, bool] = {cls: cls is not SaveImage for cls in _COMMAND_TYPES.values()}


def _coerce(value, kind: str, field: str):
    optional = kind.endswith("?")
    base = kind.rstrip("?")
    if value is None:
        if optional:
            return None
        raise CommandFieldError(f"field {field!r} must not be null", field)
    if base == "str":
        if not isinstance(value, str):
            raise CommandFieldError(f"field {field!r} must be a string", field)
        return value
    if base == "bool":
        if not isinstance(value, bool):
            raise CommandFieldError(f"field {field!r} must be a boolean", field)
        return value
    if base == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise CommandFieldError(f"field {field!r} must be a number", field)
        value = float(value)
        if not math.isfinite(value):
            raise CommandFieldError(f"field {field!r} must be finite", field)
        return value
    if base in ("vec3", "vec4"):
        n = 3 if base == "vec3" else 4
        if not isinstance(value, list) or len(value) != n:
            raise CommandFieldError(f"field {field!r} must be a list of {n} numbers", field)
        out = []
        for v in value:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise CommandFieldError(f"field {field!r} must contain finite numbers", field)
            out.append(float(v))
        return tuple(out)
    raise AssertionError(f"unhandled field kind {kind}")


def command_from_payload(data: dict) -> Command:
    """Build a typed command from a decoded JSON object (strict)."""
    if not isinstance(data, dict):
        raise CommandFieldError("command payload must be a JSON object", "$")
    if "cmd" not in data:
        raise CommandFieldError("missing 'cmd' discriminator", "cmd")
    name = data["cmd"]
    if not isinstance(name, str):
        raise CommandFieldError("'cmd' must be a string", "cmd")
    cls = _COMMAND_TYPES.get(name)
    if cls is None:
        raise UnknownCommandError(name, COMMAND_NAMES)
    kinds = _FIELD_KINDS[cls]
    unknown = sorted(set(data) - set(kinds) - {"cmd"})
    if unknown:
        raise CommandFieldError(
            f"unknown field(s) for {name}: {', '.join(unknown)}", unknown[0]
        )
    kwargs = {}
    for f in dataclass_fields(cls):
        kind = kinds[f.name]
        if f.name not in data:
            if kind.endswith("?"):
                kwargs[f.name] = None
                continue
            raise CommandFieldError(f"missing required field {f.name!r} for {name}", f.name)
        kwargs[f.name] = _coerce(data[f.name], kind, f.name)
    return cls(**kwargs)


def parse_command(payload: str | bytes) -> Command:
    """Parse one JSON command payload into a typed command."""
    if isinstance(payload, bytes):
        payload = payload.decode("utf-8")
    try:
        data = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise CommandSyntaxError(f"invalid JSON at byte {exc.pos}: {exc.msg}", exc.pos) from exc
    return command_from_payload(data)


def serialize_command(command: Command) -> str:
    """Canonical serialization: sorted keys, compact separators, no null fields.

    ``parse_command(serialize_command(c)) == c`` for every representable
    command; this is also the persisted action-log format.
    """
    name = _TYPE_NAMES[type(command)]
    payload: dict = {"cmd": name}
    for f in dataclass_fields(type(command)):
        value = getattr(command, f.name)
        if value is None:
            continue
        payload[f.name] = list(value) if isinstance(value, tuple) else value
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass(frozen=True)
class Rejection:
    code: str
    field: str
    message: str


def resolve_component(scene: ComposedScene, ref: str) -> str | None:
    """Exact component id or exact label -> component id; None when unresolved."""
    ids = {c.component_id for c in scene.components}
    if ref in ids:
        return ref
    matches = [c.component_id for c in scene.components if c.label == ref]
    if len(matches) == 1:
        return matches[0]
    return None


def _check_component(scene: ComposedScene, ref: str, field: str, out: list[Rejection]):
    if resolve_component(scene, ref) is None:
        out.append(
            Rejection("unresolved-component", field, f"no component with id or label {ref!r}")
        )


def _check_target(scene: ComposedScene, ref: str, field: str, out: list[Rejection]):
    if ref != GLOBAL_TARGET:
        _check_component(scene, ref, field, out)


def _check_unit_interval(vec, field: str, out: list[Rejection]):
    if any(not 0.0 <= v <= 1.0 for v in vec):
        out.append(Rejection("range", field, f"{field} components must be in [0, 1]"))


def validate_command(command: Command, scene: ComposedScene) -> list[Rejection]:
    """Range and reference checks; returns rejection reasons (empty = ok)."""
    out: list[Rejection] = []
    if isinstance(command, SetColor):
        _check_component(scene, command.component, "component", out)
        _check_unit_interval(command.rgb, "rgb", out)
    elif isinstance(command, SetOpacity):
        _check_component(scene, command.component, "component", out)
        if not 0.0 <= command.scale <= 2.0:
            out.append(Rejection("range", "scale", "opacity scale must be in [0, 2]"))
    elif isinstance(command, SetVisibility):
        _check_component(scene, command.component, "component", out)
    elif isinstance(command, SetLighting):
        _check_target(scene, command.target, "target", out)
        if command.gains is not None and any(not 0.0 <= g <= 4.0 for g in command.gains):
            out.append(Rejection("range", "gains", "lighting gains must be in [0, 4]"))
        if command.magnitude is not None and command.magnitude < 0.0:
            out.append(Rejection("range", "magnitude", "light magnitude must be >= 0"))
        if command.gains is None and command.magnitude is None:
            out.append(Rejection("empty-edit", "gains", "set_lighting changes nothing"))
    elif isinstance(command, SetLightDirection):
        if not 0.0 <= command.polar <= math.pi:
            out.append(Rejection("range", "polar", "polar must be in [0, pi]"))
        if command.mode is not None and command.mode not in ("headlight", "orbital"):
            out.append(Rejection("bad-enum", "mode", "mode must be headlight or orbital"))
    elif isinstance(command, SetCamera):
        if command.polar is not None and not 0.0 <= command.polar <= math.pi:
            out.append(Rejection("range", "polar", "polar must be in [0, pi]"))
        if command.distance is not None and command.distance <= 0.0:
            out.append(Rejection("range", "distance", "distance must be > 0"))
        if command.fov is not None and not 0.0 < command.fov < math.pi:
            out.append(Rejection("range", "fov", "fov must be in (0, pi)"))
    elif isinstance(command, BestView):
        _check_component(scene, command.component, "component", out)
    elif isinstance(command, SetBackground):
        _check_unit_interval(command.rgb, "rgb", out)
    elif isinstance(command, SetRenderMode):
        valid = tuple(m.value for m in RenderMode)
        if command.mode not in valid:
            out.append(Rejection("bad-enum", "mode", f"mode must be one of {valid}"))
    elif isinstance(command, SaveImage):
        if not command.path:
            out.append(Rejection("empty-path", "path", "path must be non-empty"))
    elif isinstance(command, Reset):
        if command.target not in RESET_TARGETS:
            _check_component(scene, command.target, "target", out)
            if out and out[-1].code == "unresolved-component":
                out[-1] = Rejection(
                    "unresolved-component",
                    "target",
                    f"target must be a component or one of {RESET_TARGETS}",
                )
    elif isinstance(command, Stylize):
        _check_target(scene, command.target, "target", out)
        if not command.prompt:
            out.append(Rejection("empty-prompt", "prompt", "prompt must be non-empty"))
    elif isinstance(command, Annotate):
        _check_component(scene, command.component, "component", out)
        if not command.label_text:
            out.append(Rejection("empty-label", "label_text", "label_text must be non-empty"))
    return out


@dataclass(frozen=True)
class CommandResult:
    status: str  # "ok" | "rejected" | "failed"
    detail: str
    frame_dirty: bool
    code: str | None = None  # machine-readable reason for rejections

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _apply(command: Command, session: "SessionState") -> str:
    """Mutate session state for a validated command; returns a detail string."""
    if isinstance(command, SetColor):
        cid = resolve_component(session.scene, command.component)
        session.update_edit(cid, color_override=command.rgb)
        return f"color of {cid} set to {tuple(command.rgb)}"
    if isinstance(command, SetOpacity):
        cid = resolve_component(session.scene, command.component)
        session.update_edit(cid, opacity_scale=command.scale)
        return f"opacity scale of {cid} set to {command.scale}"
    if isinstance(command, SetVisibility):
        cid = resolve_component(session.scene, command.component)
        session.update_edit(cid, visible=command.visible)
        return f"{cid} {'shown' if command.visible else 'hidden'}"
    if isinstance(command, SetLighting):
        if command.target == GLOBAL_TARGET:
            cids = list(session.edits)
        else:
            cids = [resolve_component(session.scene, command.target)]
        if command.gains is not None:
            for cid in cids:
                session.update_edit(cid, light_gains=command.gains)
        if command.magnitude is not None:
            session.light = LightState(
                session.light.azimuth,
                session.light.polar,
                command.magnitude,
                session.light.mode,
            )
        return f"lighting updated for {command.target}"
    if isinstance(command, SetLightDirection):
        mode = LightMode(command.mode) if command.mode is not None else session.light.mode
        session.light = LightState(command.azimuth, command.polar, session.light.magnitude, mode)
        return "light direction updated"
    if isinstance(command, SetCamera):
        azimuth, polar, distance = camera_spherical(session.camera)
        target = command.target_point or session.camera.target
        session.camera = orbit_camera(
            tuple(target),
            command.distance if command.distance is not None else distance,
            command.azimuth if command.azimuth is not None else azimuth,
            command.polar if command.polar is not None else polar,
            command.fov if command.fov is not None else session.camera.fov_y,
            session.camera.width,
            session.camera.height,
        )
        return "camera updated"
    if isinstance(command, BestView):
        cid = resolve_component(session.scene, command.component)
        best = session.best_view_camera(cid)
        session.camera = best.with_size(session.camera.width, session.camera.height)
        return f"camera moved to the most informative view of {cid}"
    if isinstance(command, SetBackground):
        session.background = tuple(command.rgb)
        return f"background set to {tuple(command.rgb)}"
    if isinstance(command, SetRenderMode):
        session.render_mode = RenderMode(command.mode)
        return f"render mode set to {command.mode}"
    if isinstance(command, SaveImage):
        path = session.save_frame(command.path)
        return f"frame saved to {path}"
    if isinstance(command, Reset):
        if command.target == "all":
            session.reset_all()
        elif command.target == "camera":
            session.camera = session.defaults.camera
        elif command.target == "light":
            session.light = session.defaults.light
        elif command.target == "background":
            session.background = session.defaults.background
        elif command.target == "edits":
            session.reset_edits()
        else:
            cid = resolve_component(session.scene, command.target)
            session.set_edit(cid, ComponentEdit())
        return f"reset {command.target}"
    if isinstance(command, Stylize):
        frame = session.frame_for_stylization(command.target)
        session.stylized_frame = session.stylizer.stylize(frame, command.prompt)
        return f"stylized {command.target} with prompt {command.prompt!r}"
    if isinstance(command, Annotate):
        cid = resolve_component(session.scene, command.component)
        session.set_annotation(cid, command.label_text)
        return f"annotated {cid}: {command.label_text}"
    raise AssertionError(f"unhandled command {command!r}")


def execute_command(command: Command, session: "SessionState") -> CommandResult:
    """Validate then apply a command to the session, atomically.

    On rejection or failure the session is left exactly as it was; every
    successfully executed command appends one action-log entry holding its
    canonical serialization.
    """
    rejections = validate_command(command, session.scene)
    if rejections:
        first = rejections[0]
        return CommandResult(
            "rejected",
            "; ".join(f"{r.code}({r.field}): {r.message}" for r in rejections),
            frame_dirty=False,
            code=first.code,
        )
    dirty = FRAME_DIRTY[type(command)]
    snapshot = session.snapshot()
    try:
        if dirty and not isinstance(command, Stylize):
            # any visual change invalidates a 2D stylization overlay
            session.stylized_frame = None
        detail = _apply(command, session)
    except Exception as exc:  # OSError, ProviderError, anything a backend throws
        session.restore(snapshot)
        return CommandResult("failed", f"{type(exc).__name__}: {exc}", frame_dirty=False)
    session.log_command(serialize_command(command), detail)
    return CommandResult("ok", detail, frame_dirty=dirty)


__all__ = [
    "Annotate",
    "BestView",
    "Command",
    "CommandResult",
    "COMMAND_NAMES",
    "GLOBAL_TARGET",
    "Rejection",
    "Reset",
    "RESET_TARGETS",
    "SaveImage",
    "SetBackground",
    "SetCamera",
    "SetColor",
    "SetLightDirection",
    "SetLighting",
    "SetOpacity",
    "SetRenderMode",
    "SetVisibility",
    "Stylize",
    "command_from_payload",
    "execute_command",
    "parse_command",
    "resolve_component",
    "serialize_command",
    "validate_command",
]
