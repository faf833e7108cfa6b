from splatlab.semantic.embedding import (
    DEFAULT_DIMENSION,
    VISION_ONLY,
    VISION_PLUS_TEXT,
    cosine_similarity,
    object_embedding,
    vision_embedding,
)
from splatlab.semantic.index import (
    DEFAULT_TOP_K,
    SemanticComponent,
    SemanticIndex,
    build_index,
    embed_frames_for_component,
    query_components,
)
from splatlab.semantic.providers import (
    EmbeddingProvider,
    RemoteEmbeddingProvider,
    StubEmbeddingProvider,
)

__all__ = [
    "DEFAULT_DIMENSION",
    "DEFAULT_TOP_K",
    "VISION_ONLY",
    "VISION_PLUS_TEXT",
    "EmbeddingProvider",
    "RemoteEmbeddingProvider",
    "SemanticComponent",
    "SemanticIndex",
    "StubEmbeddingProvider",
    "build_index",
    "cosine_similarity",
    "embed_frames_for_component",
    "object_embedding",
    "query_components",
    "vision_embedding",
]
