"""Pydantic request/response models for the HTTP surface."""

from __future__ import annotations

from pydantic import BaseModel


class ComponentInfo(BaseModel):
    id: str
    label: str
    palette_color: tuple[float, float, float] | None = None
    primitive_count: int = 0


class SceneInfo(BaseModel):
    scene_id: str
    kind: str
    components: list[ComponentInfo]
    has_embeddings: bool
    knowledge_entries: int


class CreateSessionRequest(BaseModel):
    scene_id: str


class SessionInfo(BaseModel):
    session_id: str
    scene_id: str
    width: int
    height: int
    frame_seq: int


class CommandResultModel(BaseModel):
    status: str
    detail: str
    frame_dirty: bool
    code: str | None = None


class CommandsResponse(BaseModel):
    results: list[CommandResultModel]


class SimilarityPair(BaseModel):
    component_id: str
    similarity: float


class LogEntryModel(BaseModel):
    sequence: int
    timestamp: float
    kind: str
    payload: str
    detail: str = ""
    similarities: list[SimilarityPair] | None = None
    tool_call_id: str | None = None


class LogResponse(BaseModel):
    session_id: str
    entries: list[LogEntryModel]


class ComponentEditState(BaseModel):
    id: str
    label: str
    palette_color: tuple[float, float, float]
    visible: bool
    opacity_scale: float
    color_override: tuple[float, float, float] | None
    light_gains: tuple[float, float, float, float]


class LightModel(BaseModel):
    azimuth: float
    polar: float
    magnitude: float
    mode: str


class SessionStateModel(BaseModel):
    session_id: str
    scene_id: str
    components: list[ComponentEditState]
    light: LightModel
    background: tuple[float, float, float]
    render_mode: str
    frame_seq: int


class MetricsGroup(BaseModel):
    user_messages: int
    samples: int
    ttft_mean_ms: float
    ttft_std_ms: float
    total_mean_ms: float
    total_std_ms: float


class MetricsSnapshot(BaseModel):
    groups: list[MetricsGroup]
    total_requests: int


__all__ = [
    "CommandResultModel",
    "CommandsResponse",
    "ComponentEditState",
    "ComponentInfo",
    "CreateSessionRequest",
    "LightModel",
    "LogEntryModel",
    "LogResponse",
    "MetricsGroup",
    "MetricsSnapshot",
    "SceneInfo",
    "SessionInfo",
    "SessionStateModel",
    "SimilarityPair",
]
