"""Service configuration: a JSON key-value file plus environment credentials.

Only credentials come from the environment; everything else lives in the
config file so a deployment is reproducible from the file alone.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field

from splatlab.agents.providers import RemoteChatProvider, ScriptedChatProvider
from splatlab.agents.runtime import MAX_ITERATIONS_DEFAULT
from splatlab.agents.stylize import RemoteStylizationProvider, StubStylizationProvider
from splatlab.semantic.embedding import DEFAULT_DIMENSION
from splatlab.semantic.index import DEFAULT_TOP_K
from splatlab.session import VIEW_SAMPLE_COUNT
from splatlab.views import ENTROPY_RESOLUTION


class ChatProviderConfig(BaseModel):
    kind: Literal["scripted", "remote"] = "scripted"
    scenario_path: str | None = None  # scripted
    endpoint: str = "https://api.openai.com/v1/chat/completions"  # remote
    model: str = "gpt-4o"
    vision_capable: bool = True
    timeout_s: float = 60.0
    api_key_env: str = "SPLATLAB_API_KEY"


class EmbeddingProviderConfig(BaseModel):
    kind: Literal["stub", "remote"] = "stub"
    dimension: int = DEFAULT_DIMENSION
    endpoint: str = ""
    cache_dir: str | None = None
    timeout_s: float = 30.0
    api_key_env: str = "SPLATLAB_EMBED_KEY"


class StylizationProviderConfig(BaseModel):
    kind: Literal["stub", "remote"] = "stub"
    endpoint: str = ""
    timeout_s: float = 120.0
    api_key_env: str = "SPLATLAB_STYLE_KEY"


class ServiceConfig(BaseModel):
    scenes_dir: str = "scenes"
    host: str = "127.0.0.1"
    port: int = 8787
    save_dir: str = "saved_images"
    studio_dir: str | None = None  # static browser studio, mounted at /studio
    default_k: int = DEFAULT_TOP_K
    max_iterations: int = MAX_ITERATIONS_DEFAULT
    memory_cap: int = 10
    entropy_resolution: int = ENTROPY_RESOLUTION
    view_sample_count: int = VIEW_SAMPLE_COUNT
    chat: ChatProviderConfig = Field(default_factory=ChatProviderConfig)
    embedding: EmbeddingProviderConfig = Field(default_factory=EmbeddingProviderConfig)
    stylization: StylizationProviderConfig = Field(default_factory=StylizationProviderConfig)


def load_config(path: str | Path | None = None) -> ServiceConfig:
    if path is None:
        return ServiceConfig()
    return ServiceConfig(**json.loads(Path(path).read_text("utf-8")))


def build_chat_provider(config: ServiceConfig):
    chat = config.chat
    if chat.kind == "scripted":
        if chat.scenario_path:
            provider = ScriptedChatProvider.from_file(chat.scenario_path)
            provider.vision_capable = chat.vision_capable
            return provider
        return ScriptedChatProvider([], vision_capable=chat.vision_capable)
    return RemoteChatProvider(
        endpoint=chat.endpoint,
        model=chat.model,
        vision_capable=chat.vision_capable,
        timeout=chat.timeout_s,
        api_key_env=chat.api_key_env,
    )


def build_embedding_provider(config: ServiceConfig):
    from splatlab.semantic.providers import RemoteEmbeddingProvider, StubEmbeddingProvider

    emb = config.embedding
    if emb.kind == "stub":
        return StubEmbeddingProvider(dimension=emb.dimension)
    return RemoteEmbeddingProvider(
        endpoint=emb.endpoint,
        dimension=emb.dimension,
        cache_dir=emb.cache_dir,
        timeout=emb.timeout_s,
        api_key=os.environ.get(emb.api_key_env),
    )


def build_stylizer(config: ServiceConfig):
    sty = config.stylization
    if sty.kind == "stub":
        return StubStylizationProvider()
    return RemoteStylizationProvider(
        endpoint=sty.endpoint,
        timeout=sty.timeout_s,
        api_key=os.environ.get(sty.api_key_env),
    )


__all__ = [
    "ChatProviderConfig",
    "EmbeddingProviderConfig",
    "ServiceConfig",
    "StylizationProviderConfig",
    "build_chat_provider",
    "build_embedding_provider",
    "build_stylizer",
    "load_config",
]
