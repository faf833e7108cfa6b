"""2D stylization providers: prompt-driven image-to-image editing.

The remote protocol posts ``{"image": <base64 png>, "prompt": str}`` and
expects ``{"image": <base64 png>}`` back. The stub applies a deterministic
prompt-seeded color remix so tests get a visible, reproducible change
without any model in the loop.
"""

from __future__ import annotations

import base64
import hashlib

import numpy as np

from splatlab.errors import ProviderError
from splatlab.render.image import ImageRGBA, decode_png, encode_png


class StubStylizationProvider:
    """Deterministic filter: channel remix + tint derived from the prompt.

    An empty prompt is the identity. The alpha channel is preserved so
    entropy-based tooling keeps working on stylized frames.
    """

    def stylize(self, frame: ImageRGBA, prompt: str) -> ImageRGBA:
        if not prompt:
            return frame
        seed = int.from_bytes(hashlib.sha256(prompt.encode("utf-8")).digest()[:8], "little")
        rng = np.random.default_rng(seed)
        mix = 0.6 * np.eye(3) + rng.uniform(0.0, 0.4, (3, 3))
        mix /= mix.sum(axis=1, keepdims=True)
        tint = rng.uniform(-0.08, 0.08, 3)
        out = frame.pixels.astype(np.float64).copy()
        out[:, :, :3] = np.clip(out[:, :, :3] @ mix.T + tint, 0.0, 1.0)
        return ImageRGBA(out.astype(np.float32))


class RemoteStylizationProvider:
    def __init__(self, endpoint: str, timeout: float = 120.0, api_key: str | None = None):
        self.endpoint = endpoint
        self.timeout = timeout
        self.api_key = api_key

    def stylize(self, frame: ImageRGBA, prompt: str) -> ImageRGBA:
        import httpx

        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        payload = {
            "image": base64.b64encode(encode_png(frame)).decode("ascii"),
            "prompt": prompt,
        }
        try:
            response = httpx.post(
                self.endpoint, json=payload, headers=headers, timeout=self.timeout
            )
            response.raise_for_status()
            data = response.json()
            return decode_png(base64.b64decode(data["image"]))
        except Exception as exc:
            raise ProviderError(f"stylization endpoint failed: {exc}") from exc


__all__ = ["RemoteStylizationProvider", "StubStylizationProvider"]
