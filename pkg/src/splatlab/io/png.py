"""Lossless PNG output for framebuffers."""

from __future__ import annotations

from pathlib import Path

from splatlab.render.image import ImageRGBA, decode_png, encode_png


def save_image(frame: ImageRGBA, path: str | Path) -> None:
    """Write the frame as an RGBA PNG (8-bit, lossless). OS errors propagate."""
    Path(path).write_bytes(encode_png(frame))


def load_image(path: str | Path) -> ImageRGBA:
    return decode_png(Path(path).read_bytes())


__all__ = ["save_image", "load_image"]
