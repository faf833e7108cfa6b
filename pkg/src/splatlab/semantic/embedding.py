"""Embedding arithmetic: view averaging, vision/text fusion, cosine scoring."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from splatlab.errors import EmbeddingDimensionError, UndefinedSimilarityError

DEFAULT_DIMENSION = 512

VISION_ONLY = "vision_only"
VISION_PLUS_TEXT = "vision_plus_text"


def _as_vector(values, name: str = "embedding") -> np.ndarray:
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1:
        raise EmbeddingDimensionError(f"{name} must be a 1-D vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise EmbeddingDimensionError(f"{name} contains non-finite values")
    return vec


def vision_embedding(frame_embeddings: Sequence[np.ndarray]) -> np.ndarray:
    """Componentwise mean of per-frame embeddings (k >= 1, equal dimensions)."""
    if len(frame_embeddings) == 0:
        raise ValueError("vision_embedding requires at least one frame embedding")
    vectors = [_as_vector(v, f"frame embedding {i}") for i, v in enumerate(frame_embeddings)]
    dim = len(vectors[0])
    for i, v in enumerate(vectors):
        if len(v) != dim:
            raise EmbeddingDimensionError(
                f"frame embedding {i} has dimension {len(v)}, expected {dim}"
            )
    return np.mean(np.stack(vectors), axis=0)


def object_embedding(vision: np.ndarray, text: np.ndarray | None = None) -> np.ndarray:
    """Fused object embedding: (vision + text) / 2, or vision alone without text."""
    vision = _as_vector(vision, "vision embedding")
    if text is None:
        return vision
    text = _as_vector(text, "text embedding")
    if len(text) != len(vision):
        raise EmbeddingDimensionError(
            f"text embedding dimension {len(text)} != vision dimension {len(vision)}"
        )
    return (vision + text) / 2.0


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between two vectors, clamped into [-1, 1]."""
    va = _as_vector(a, "a")
    vb = _as_vector(b, "b")
    if len(va) != len(vb):
        raise EmbeddingDimensionError(f"dimension mismatch: {len(va)} vs {len(vb)}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise UndefinedSimilarityError("cosine similarity is undefined for zero-norm vectors")
    return float(np.clip(np.dot(va, vb) / (na * nb), -1.0, 1.0))


__all__ = [
    "DEFAULT_DIMENSION",
    "VISION_ONLY",
    "VISION_PLUS_TEXT",
    "cosine_similarity",
    "object_embedding",
    "vision_embedding",
]
