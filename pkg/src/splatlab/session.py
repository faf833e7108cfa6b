"""Per-session scene state: edits, camera, light, action log, overlays.

A session owns everything a command can touch. Mutations happen only under
the owner's serialization (one logical executor per session); the scene
itself is immutable and shared.
"""

from __future__ import annotations

import math
import time
import uuid
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Protocol

import numpy as np

from splatlab.core.types import ComponentEdit, ComposedScene, LightState, Vec3
from splatlab.io.bundle import SceneBundle
from splatlab.io.png import save_image
from splatlab.render.camera import Camera, DEFAULT_FOV_Y
from splatlab.render.image import ImageRGBA
from splatlab.render.rasterizer import (
    RenderMode,
    flatten_component,
    flatten_scene,
    render_components,
)
from splatlab.views import ENTROPY_RESOLUTION, sample_icosphere_cameras, select_top_k_views

VIEW_SAMPLE_COUNT = 92  # icosphere candidate views for best-view selection

KIND_COMMAND = "command"
KIND_TOOL_CALL = "tool_call"
KIND_QUERY_RESULT = "query_result"
KIND_AGENT_REPLY = "agent_reply"


class StylizationProvider(Protocol):
    def stylize(self, frame: ImageRGBA, prompt: str) -> ImageRGBA: ...


class IdentityStylizer:
    """Fallback stylizer: returns the frame unchanged."""

    def stylize(self, frame: ImageRGBA, prompt: str) -> ImageRGBA:
        return frame


@dataclass(frozen=True)
class ActionLogEntry:
    sequence: int
    timestamp: float
    kind: str
    payload: str
    detail: str = ""
    similarities: tuple[tuple[str, float], ...] | None = None
    tool_call_id: str | None = None


@dataclass(frozen=True)
class SessionDefaults:
    camera: Camera
    light: LightState
    background: Vec3


@dataclass
class _Snapshot:
    edits: dict[str, ComponentEdit]
    camera: Camera
    light: LightState
    background: Vec3
    render_mode: RenderMode
    annotations: dict[str, str]
    stylized_frame: ImageRGBA | None
    log_length: int


class SessionState:
    def __init__(
        self,
        bundle: SceneBundle,
        stylizer: StylizationProvider | None = None,
        save_dir: str | Path | None = None,
        session_id: str | None = None,
        view_sample_count: int = VIEW_SAMPLE_COUNT,
        entropy_resolution: int = ENTROPY_RESOLUTION,
    ):
        if bundle.scene is None:
            raise ValueError(f"bundle {bundle.scene_id!r} is query-only and cannot be rendered")
        self.id = session_id or uuid.uuid4().hex[:12]
        self.bundle = bundle
        self.scene: ComposedScene = bundle.scene
        self.defaults = SessionDefaults(
            camera=bundle.default_camera,
            light=bundle.scene.global_light,
            background=bundle.scene.background,
        )
        self.stylizer: StylizationProvider = stylizer or IdentityStylizer()
        self.save_dir = Path(save_dir) if save_dir else Path.cwd() / "saved_images"
        self.view_sample_count = view_sample_count
        self.entropy_resolution = entropy_resolution
        self.created_at = time.time()

        self.edits: dict[str, ComponentEdit] = {
            c.component_id: ComponentEdit() for c in self.scene.components
        }
        self._camera: Camera = self.defaults.camera
        self._light: LightState = self.defaults.light
        self._background: Vec3 = self.defaults.background
        self._render_mode: RenderMode = RenderMode.SHADED
        self._stylized_frame: ImageRGBA | None = None
        self.annotations: dict[str, str] = {}
        self.action_log: list[ActionLogEntry] = []
        self.agent_history: list[Any] = []
        self._sequence = 0
        self._frame_seq = 0
        self._best_views: dict[str, Camera] = {}
        self._semantic_index = None
        self._frame_cache: ImageRGBA | None = None

    # -- visual state (every write drops the cached framebuffer) -------------

    def _invalidate_frame(self) -> None:
        self._frame_cache = None

    @property
    def camera(self) -> Camera:
        return self._camera

    @camera.setter
    def camera(self, value: Camera) -> None:
        self._camera = value
        self._invalidate_frame()

    @property
    def light(self) -> LightState:
        return self._light

    @light.setter
    def light(self, value: LightState) -> None:
        self._light = value
        self._invalidate_frame()

    @property
    def background(self) -> Vec3:
        return self._background

    @background.setter
    def background(self, value: Vec3) -> None:
        self._background = tuple(value)
        self._invalidate_frame()

    @property
    def render_mode(self) -> RenderMode:
        return self._render_mode

    @render_mode.setter
    def render_mode(self, value: RenderMode) -> None:
        self._render_mode = value
        self._invalidate_frame()

    @property
    def stylized_frame(self) -> ImageRGBA | None:
        return self._stylized_frame

    @stylized_frame.setter
    def stylized_frame(self, value: ImageRGBA | None) -> None:
        self._stylized_frame = value
        self._invalidate_frame()

    # -- rendering ---------------------------------------------------------

    def render_current(self) -> ImageRGBA:
        frame, _ = render_components(
            flatten_scene(self.scene, self.edits),
            self.light,
            self.camera,
            self.background,
            self.render_mode,
        )
        return frame

    def displayed_frame(self) -> ImageRGBA:
        """What the client sees: the stylization overlay when active.

        Cached until the next visual mutation, so repeated reads (frame
        pushes, agent perception) cost nothing."""
        if self._frame_cache is None:
            self._frame_cache = (
                self._stylized_frame if self._stylized_frame is not None else self.render_current()
            )
        return self._frame_cache

    def frame_for_stylization(self, target: str) -> ImageRGBA:
        from splatlab.commands import GLOBAL_TARGET, resolve_component

        if target == GLOBAL_TARGET:
            return self.render_current()
        cid = resolve_component(self.scene, target)
        comp = self.scene.component(cid)
        frame, _ = render_components(
            [flatten_component(comp, self.edits[cid])],
            self.light,
            self.camera,
            self.background,
            self.render_mode,
        )
        return frame

    def next_frame_seq(self) -> int:
        self._frame_seq += 1
        return self._frame_seq

    # -- edits ------------------------------------------------------------

    def set_edit(self, component_id: str, edit: ComponentEdit) -> None:
        if component_id not in self.edits:
            raise KeyError(component_id)
        self.edits[component_id] = edit
        self._invalidate_frame()

    def update_edit(self, component_id: str, **changes) -> None:
        self.set_edit(component_id, replace(self.edits[component_id], **changes))

    def reset_edits(self) -> None:
        for cid in self.edits:
            self.edits[cid] = ComponentEdit()
        self._invalidate_frame()

    def reset_all(self) -> None:
        self.reset_edits()
        self.camera = self.defaults.camera
        self.light = self.defaults.light
        self.background = self.defaults.background
        self.render_mode = RenderMode.SHADED
        self.annotations = {}
        self.stylized_frame = None

    def set_annotation(self, component_id: str, text: str) -> None:
        self.annotations[component_id] = text

    # -- best view ---------------------------------------------------------

    def view_cameras(self) -> list[Camera]:
        sphere = self.scene.bounding_sphere()
        radius = max(sphere.radius, 1e-3) / math.sin(DEFAULT_FOV_Y / 2.0) * 1.4
        return sample_icosphere_cameras(
            self.view_sample_count,
            sphere.center,
            radius,
            width=self.entropy_resolution,
            height=self.entropy_resolution,
        )

    def best_view_camera(self, component_id: str) -> Camera:
        cached = self._best_views.get(component_id)
        if cached is not None:
            return cached
        comp = self.scene.component(component_id)
        best = select_top_k_views(comp, self.view_cameras(), 1, self.light)[0]
        self._best_views[component_id] = best.camera
        return best.camera

    def semantic_index(self, provider, k: int | None = None):
        """Bundle embeddings when complete, else a lazily built (cached) index."""
        if self._semantic_index is not None:
            return self._semantic_index
        index = None if self.bundle.needs_index() else self.bundle.semantic_index()
        if index is None:
            from splatlab.semantic.index import DEFAULT_TOP_K, build_index

            index = build_index(
                self.scene, self.view_cameras(), provider, k or DEFAULT_TOP_K
            )
        self._semantic_index = index
        return index

    # -- persistence of frames ----------------------------------------------

    def save_frame(self, path: str) -> Path:
        out = Path(path)
        if not out.is_absolute():
            self.save_dir.mkdir(parents=True, exist_ok=True)
            out = self.save_dir / out
        save_image(self.displayed_frame(), out)
        return out

    # -- snapshotting (command atomicity) -----------------------------------

    def snapshot(self) -> _Snapshot:
        return _Snapshot(
            edits=dict(self.edits),
            camera=self.camera,
            light=self.light,
            background=self.background,
            render_mode=self.render_mode,
            annotations=dict(self.annotations),
            stylized_frame=self.stylized_frame,
            log_length=len(self.action_log),
        )

    def restore(self, snap: _Snapshot) -> None:
        self.edits = dict(snap.edits)
        self.camera = snap.camera
        self.light = snap.light
        self.background = snap.background
        self.render_mode = snap.render_mode
        self.annotations = dict(snap.annotations)
        self.stylized_frame = snap.stylized_frame
        del self.action_log[snap.log_length :]
        self._invalidate_frame()

    # -- action log ----------------------------------------------------------

    def _append_log(self, kind: str, payload: str, **extra) -> ActionLogEntry:
        self._sequence += 1
        entry = ActionLogEntry(
            sequence=self._sequence, timestamp=time.time(), kind=kind, payload=payload, **extra
        )
        self.action_log.append(entry)
        return entry

    def log_command(self, canonical: str, detail: str = "") -> ActionLogEntry:
        return self._append_log(KIND_COMMAND, canonical, detail=detail)

    def log_tool_call(self, name: str, payload: str, tool_call_id: str | None = None,
                      detail: str = "") -> ActionLogEntry:
        return self._append_log(KIND_TOOL_CALL, payload, detail=detail or name,
                                tool_call_id=tool_call_id)

    def log_query_result(
        self, query: str, similarities: list[tuple[str, float]],
        tool_call_id: str | None = None,
    ) -> ActionLogEntry:
        return self._append_log(
            KIND_QUERY_RESULT, query, similarities=tuple(similarities),
            tool_call_id=tool_call_id,
        )

    def log_agent_reply(self, text: str) -> ActionLogEntry:
        return self._append_log(KIND_AGENT_REPLY, text)

    def command_log_payloads(self) -> list[str]:
        return [e.payload for e in self.action_log if e.kind == KIND_COMMAND]

    # -- textual scene digest (perception fallback for visionless providers) --

    def scene_digest(self) -> str:
        lines = ["Scene components (id | label | state):"]
        for comp in self.scene.components:
            edit = self.edits[comp.component_id]
            state = []
            if not edit.visible:
                state.append("hidden")
            if edit.opacity_scale != 1.0:
                state.append(f"opacity x{edit.opacity_scale:g}")
            if edit.color_override is not None:
                state.append(f"recolored to {tuple(round(c, 3) for c in edit.color_override)}")
            if edit.light_gains != (1.0, 1.0, 1.0, 1.0):
                state.append(f"light gains {tuple(round(g, 3) for g in edit.light_gains)}")
            lines.append(
                f"- {comp.component_id} | {comp.label or '(unlabelled)'} | "
                f"{', '.join(state) or 'default'}"
            )
        cam = self.camera
        lines.append(
            f"Camera at {tuple(round(v, 3) for v in cam.position)} looking at "
            f"{tuple(round(v, 3) for v in cam.target)}"
        )
        lines.append(
            f"Light: mode={self.light.mode.value} azimuth={self.light.azimuth:.3f} "
            f"polar={self.light.polar:.3f} magnitude={self.light.magnitude:g}"
        )
        lines.append(f"Background: {tuple(round(c, 3) for c in self.background)}")
        lines.append(f"Render mode: {self.render_mode.value}")
        return "\n".join(lines)

    # -- annotation anchors ---------------------------------------------------

    def annotation_anchors(self) -> list[tuple[str, str, float, float]]:
        """(component_id, text, px, py) for annotations whose projected
        centroid is in front of the camera."""
        from splatlab.render.rasterizer import project_points

        anchors = []
        for cid, text in sorted(self.annotations.items()):
            comp = self.scene.component(cid)
            centroid = comp.packed.mu.mean(axis=0)
            means, _, valid = project_points(np.asarray(centroid)[None, :], self.camera)
            if valid[0]:
                anchors.append((cid, text, float(means[0, 0]), float(means[0, 1])))
        return anchors


__all__ = [
    "ActionLogEntry",
    "IdentityStylizer",
    "KIND_AGENT_REPLY",
    "KIND_COMMAND",
    "KIND_QUERY_RESULT",
    "KIND_TOOL_CALL",
    "SessionDefaults",
    "SessionState",
    "StylizationProvider",
    "VIEW_SAMPLE_COUNT",
]
