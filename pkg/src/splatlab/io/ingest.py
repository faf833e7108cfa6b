"""Ingest pre-rendered multi-view captures into a query-only bundle.

For datasets whose splat scenes are unavailable, entropy ranking and the
embedding pipeline run on the provided frames directly (no rendering),
yielding a bundle that supports open-vocabulary querying but not rendering.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from splatlab.errors import IngestError
from splatlab.io.bundle import KIND_QUERY_ONLY, SceneBundle
from splatlab.render.camera import Camera
from splatlab.render.image import ImageRGBA
from splatlab.semantic.index import DEFAULT_TOP_K, SemanticComponent, embed_frames_for_component
from splatlab.semantic.providers import EmbeddingProvider
from splatlab.views import image_alpha_entropy


def rank_frames_by_entropy(frames: Sequence[ImageRGBA]) -> list[int]:
    """Frame indices sorted by descending alpha entropy, ties ascending."""
    scored = [(-image_alpha_entropy(f), i) for i, f in enumerate(frames)]
    return [i for _, i in sorted(scored)]


def ingest_multiview(
    scene_id: str,
    frames: Mapping[str, Sequence[ImageRGBA]],
    poses: Mapping[str, Sequence[Camera]],
    labels: Mapping[str, str],
    provider: EmbeddingProvider,
    k: int = DEFAULT_TOP_K,
) -> SceneBundle:
    """Build a query-only bundle out of per-component frames and camera poses."""
    if set(frames) != set(poses):
        raise IngestError(
            f"frame/pose component sets differ: {sorted(frames)} vs {sorted(poses)}"
        )
    if not frames:
        raise IngestError("no components to ingest")
    embeddings: dict[str, SemanticComponent] = {}
    views: dict[str, list[Camera]] = {}
    dimension = None
    for cid in sorted(frames):
        comp_frames = list(frames[cid])
        comp_poses = list(poses[cid])
        if not comp_frames:
            raise IngestError(f"component {cid!r} has no frames")
        if len(comp_frames) != len(comp_poses):
            raise IngestError(
                f"component {cid!r}: {len(comp_frames)} frames but {len(comp_poses)} poses"
            )
        ranked = rank_frames_by_entropy(comp_frames)
        top = ranked[: min(k, len(ranked))]
        label = labels.get(cid, "")
        fused, source = embed_frames_for_component(
            [comp_frames[i] for i in top], label, provider
        )
        embeddings[cid] = SemanticComponent(cid, label, fused, source)
        views[cid] = [comp_poses[i] for i in top]
        dimension = len(fused)
    first = sorted(frames)[0]
    return SceneBundle(
        scene_id=scene_id,
        scene=None,
        default_camera=poses[first][0],
        embeddings=embeddings,
        embedding_dimension=dimension,
        kind=KIND_QUERY_ONLY,
        query_components=tuple((cid, labels.get(cid, "")) for cid in sorted(frames)),
        views=views,
    )


__all__ = ["ingest_multiview", "rank_frames_by_entropy"]
