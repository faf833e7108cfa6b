"""Per-component multimodal index and open-vocabulary querying.

Queries return the full ranking, never a filtered subset: visionless agents
cannot validate matches, so hiding low-similarity components would silently
mask exactly the failure mode the caller needs to see.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from splatlab.core.types import ComposedScene
from splatlab.errors import EmbeddingDimensionError, ProviderError
from splatlab.render.camera import Camera
from splatlab.semantic.embedding import (
    VISION_ONLY,
    VISION_PLUS_TEXT,
    cosine_similarity,
    object_embedding,
    vision_embedding,
)
from splatlab.semantic.providers import EmbeddingProvider
from splatlab.views import select_top_k_views

DEFAULT_TOP_K = 5  # effective operating range is 5..10
PROVIDER_BACKGROUND = (0.5, 0.5, 0.5)  # neutral gray minimizes hue bias


@dataclass(frozen=True)
class SemanticComponent:
    component_id: str
    label: str
    object_embedding: np.ndarray
    source: str  # VISION_ONLY or VISION_PLUS_TEXT


@dataclass(frozen=True)
class SemanticIndex:
    components: tuple[SemanticComponent, ...]
    dimension: int
    partial: bool = False
    failures: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    def __post_init__(self):
        for comp in self.components:
            if comp.object_embedding.shape != (self.dimension,):
                raise EmbeddingDimensionError(
                    f"component {comp.component_id!r} embedding has shape "
                    f"{comp.object_embedding.shape}, index dimension is {self.dimension}"
                )

    def __len__(self) -> int:
        return len(self.components)


def query_components(
    index: SemanticIndex, query_text: str, provider: EmbeddingProvider
) -> list[tuple[str, float]]:
    """Score every indexed component against a text query.

    Returns all (component_id, cosine similarity) pairs sorted by descending
    similarity, ties by component id.
    """
    if len(index) == 0:
        raise ValueError("semantic index is empty")
    try:
        query = provider.embed_text(query_text)
    except ProviderError:
        raise
    except Exception as exc:
        raise ProviderError(f"query embedding failed: {exc}") from exc
    scored = [
        (comp.component_id, cosine_similarity(query, comp.object_embedding))
        for comp in index.components
    ]
    return sorted(scored, key=lambda pair: (-pair[1], pair[0]))


def embed_frames_for_component(
    frames: Sequence, label: str, provider: EmbeddingProvider, normalize: bool = False
) -> tuple[np.ndarray, str]:
    """Fuse frame embeddings (mean) with an optional label embedding."""
    flattened = [f.over_background(PROVIDER_BACKGROUND) for f in frames]
    frame_embeddings = provider.embed_images(flattened, hint=label or None)
    vision = vision_embedding(frame_embeddings)
    if label:
        text = provider.embed_text(label)
        fused, source = object_embedding(vision, text), VISION_PLUS_TEXT
    else:
        fused, source = object_embedding(vision), VISION_ONLY
    if normalize:
        norm = np.linalg.norm(fused)
        if norm > 0:
            fused = fused / norm
    return fused, source


def build_index(
    scene: ComposedScene,
    cameras: Sequence[Camera],
    provider: EmbeddingProvider,
    k: int = DEFAULT_TOP_K,
    normalize: bool = False,
) -> SemanticIndex:
    """Build the multimodal index: entropy-ranked top-k views per component,
    frame embeddings averaged, fused with the label text when present.

    Per-component failures are recorded and skipped so one bad component
    does not lose the rest; the resulting index is flagged partial.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    components: list[SemanticComponent] = []
    failures: list[tuple[str, str]] = []
    for comp in scene.components:
        try:
            views = select_top_k_views(comp, cameras, k, scene.global_light)
            fused, source = embed_frames_for_component(
                [v.frame for v in views], comp.label, provider, normalize
            )
            components.append(
                SemanticComponent(comp.component_id, comp.label, fused, source)
            )
        except Exception as exc:
            failures.append((comp.component_id, str(exc)))
    if not components:
        raise ProviderError(f"index build failed for every component: {failures}")
    return SemanticIndex(
        components=tuple(components),
        dimension=len(components[0].object_embedding),
        partial=bool(failures),
        failures=tuple(failures),
    )


__all__ = [
    "DEFAULT_TOP_K",
    "PROVIDER_BACKGROUND",
    "SemanticComponent",
    "SemanticIndex",
    "build_index",
    "embed_frames_for_component",
    "query_components",
]
