"""Embedding providers: a deterministic stub for tests plus a cached HTTP client.

The remote protocol is a plain JSON POST: ``{"images": [<base64 png>, ...]}``
or ``{"texts": [...]}`` to the configured endpoint, answered with
``{"embeddings": [[...], ...]}`` of the configured dimension.
"""

from __future__ import annotations

import base64
import hashlib
import re
from pathlib import Path
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from splatlab.errors import ProviderError
from splatlab.render.image import ImageRGBA, encode_png

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@runtime_checkable
class EmbeddingProvider(Protocol):
    dimension: int

    def embed_images(
        self, frames: Sequence[ImageRGBA], hint: str | None = None
    ) -> list[np.ndarray]:
        """Embed a batch of frames. ``hint`` is optional caller-side context
        (e.g. the object's name); providers may ignore it."""
        ...

    def embed_text(self, text: str) -> np.ndarray:
        ...


def _seed_vector(seed_bytes: bytes, dimension: int) -> np.ndarray:
    seed = int.from_bytes(hashlib.sha256(seed_bytes).digest()[:8], "little")
    return np.random.default_rng(seed).standard_normal(dimension)


class StubEmbeddingProvider:
    """Deterministic offline provider.

    Text maps to the L2-normalized sum of per-token hash vectors over the
    token multiset, so equal texts embed identically and token order is
    irrelevant. Image batches embed by content hash, unless the caller
    supplies a ``hint``: then every frame embeds as the hint text does,
    modeling an ideal encoder whose views of an object cluster exactly at
    the object's name.
    """

    def __init__(self, dimension: int = 512):
        self.dimension = dimension

    def embed_text(self, text: str) -> np.ndarray:
        tokens = _TOKEN_RE.findall(text.lower())
        if not tokens:
            vec = _seed_vector(b"\x00empty-text", self.dimension)
        else:
            vec = np.zeros(self.dimension)
            for token in tokens:
                vec += _seed_vector(b"text:" + token.encode("utf-8"), self.dimension)
        norm = np.linalg.norm(vec)
        return vec if norm == 0.0 else vec / norm

    def embed_images(
        self, frames: Sequence[ImageRGBA], hint: str | None = None
    ) -> list[np.ndarray]:
        if hint:
            anchor = self.embed_text(hint)
            return [anchor.copy() for _ in frames]
        out = []
        for frame in frames:
            vec = _seed_vector(b"image:" + frame.to_uint8().tobytes(), self.dimension)
            out.append(vec / np.linalg.norm(vec))
        return out


class RemoteEmbeddingProvider:
    """HTTP provider with a content-addressed disk cache.

    Responses are cached by SHA-256 of the request payload so repeated index
    builds are reproducible and cheap.
    """

    def __init__(
        self,
        endpoint: str,
        dimension: int = 512,
        cache_dir: str | Path | None = None,
        timeout: float = 30.0,
        api_key: str | None = None,
    ):
        self.endpoint = endpoint
        self.dimension = dimension
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.timeout = timeout
        self.api_key = api_key
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _cached(self, key: str) -> np.ndarray | None:
        if not self.cache_dir:
            return None
        path = self.cache_dir / f"{key}.npy"
        return np.load(path) if path.exists() else None

    def _store(self, key: str, vec: np.ndarray) -> None:
        if self.cache_dir:
            np.save(self.cache_dir / f"{key}.npy", vec)

    def _post(self, payload: dict) -> list[np.ndarray]:
        import httpx

        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = httpx.post(
                self.endpoint, json=payload, headers=headers, timeout=self.timeout
            )
            response.raise_for_status()
            data = response.json()
        except Exception as exc:
            raise ProviderError(f"embedding endpoint failed: {exc}") from exc
        vectors = [np.asarray(v, dtype=np.float64) for v in data["embeddings"]]
        for v in vectors:
            if v.shape != (self.dimension,):
                raise ProviderError(
                    f"embedding endpoint returned dimension {v.shape}, expected {self.dimension}"
                )
        return vectors

    def embed_text(self, text: str) -> np.ndarray:
        key = hashlib.sha256(f"text:{self.dimension}:{text}".encode("utf-8")).hexdigest()
        cached = self._cached(key)
        if cached is not None:
            return cached
        vec = self._post({"texts": [text]})[0]
        self._store(key, vec)
        return vec

    def embed_images(
        self, frames: Sequence[ImageRGBA], hint: str | None = None
    ) -> list[np.ndarray]:
        del hint  # remote encoders see pixels only
        encoded = [encode_png(f) for f in frames]
        keys = [
            hashlib.sha256(b"image:%d:" % self.dimension + raw).hexdigest() for raw in encoded
        ]
        out: list[np.ndarray | None] = [self._cached(k) for k in keys]
        missing = [i for i, v in enumerate(out) if v is None]
        if missing:
            payload = {
                "images": [base64.b64encode(encoded[i]).decode("ascii") for i in missing]
            }
            fetched = self._post(payload)
            if len(fetched) != len(missing):
                raise ProviderError("embedding endpoint returned wrong batch size")
            for i, vec in zip(missing, fetched):
                out[i] = vec
                self._store(keys[i], vec)
        return [v for v in out if v is not None]


__all__ = ["EmbeddingProvider", "StubEmbeddingProvider", "RemoteEmbeddingProvider"]
