"""RGBA framebuffer type plus PNG helpers used across the package."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image


@dataclass(frozen=True)
class ImageRGBA:
    """Row-major RGBA framebuffer with float32 channels in [0, 1]."""

    pixels: np.ndarray  # (height, width, 4) float32

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 4:
            raise ValueError(f"pixels must have shape (h, w, 4), got {px.shape}")
        if not np.all(np.isfinite(px)):
            raise ValueError("pixels contain non-finite values")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ValueError("pixel channels must lie in [0, 1]")
        object.__setattr__(self, "pixels", np.ascontiguousarray(px, dtype=np.float32))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def alpha(self) -> np.ndarray:
        return self.pixels[:, :, 3]

    @property
    def rgb(self) -> np.ndarray:
        return self.pixels[:, :, :3]

    def to_uint8(self) -> np.ndarray:
        return np.clip(np.rint(self.pixels * 255.0), 0, 255).astype(np.uint8)

    def over_background(self, background: tuple[float, float, float]) -> "ImageRGBA":
        """Composite onto an opaque background color (alpha becomes 1)."""
        bg = np.asarray(background, dtype=np.float32)
        out = np.empty_like(self.pixels)
        a = self.pixels[:, :, 3:4]
        out[:, :, :3] = self.pixels[:, :, :3] + (1.0 - a) * bg[None, None, :]
        out[:, :, 3] = 1.0
        return ImageRGBA(np.clip(out, 0.0, 1.0))

    def resized(self, width: int, height: int) -> "ImageRGBA":
        img = Image.fromarray(self.to_uint8(), mode="RGBA").resize(
            (width, height), Image.BILINEAR
        )
        return ImageRGBA(np.asarray(img, dtype=np.float32) / 255.0)

    @staticmethod
    def filled(width: int, height: int, rgba: tuple[float, float, float, float]) -> "ImageRGBA":
        px = np.empty((height, width, 4), dtype=np.float32)
        px[:, :] = rgba
        return ImageRGBA(px)

    @staticmethod
    def from_uint8(data: np.ndarray) -> "ImageRGBA":
        arr = np.asarray(data)
        if arr.ndim == 3 and arr.shape[2] == 3:
            alpha = np.full(arr.shape[:2] + (1,), 255, dtype=arr.dtype)
            arr = np.concatenate([arr, alpha], axis=2)
        return ImageRGBA(arr.astype(np.float32) / 255.0)


def encode_png(frame: ImageRGBA) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(frame.to_uint8(), mode="RGBA").save(buf, format="PNG")
    return buf.getvalue()


def decode_png(data: bytes) -> ImageRGBA:
    img = Image.open(io.BytesIO(data)).convert("RGBA")
    return ImageRGBA.from_uint8(np.asarray(img))


__all__ = ["ImageRGBA", "encode_png", "decode_png"]
