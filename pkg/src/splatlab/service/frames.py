"""Frame encoding for clients, including annotation overlays.

Overlays are painted at encode time only: the session framebuffer itself
stays untouched, so log replay and golden-image comparisons see pure
renders.
"""

from __future__ import annotations

import base64
import io

from PIL import Image, ImageDraw

from splatlab.session import SessionState


def encode_session_frame(session: SessionState) -> bytes:
    frame = session.displayed_frame()
    img = Image.fromarray(frame.to_uint8(), mode="RGBA")
    anchors = session.annotation_anchors()
    if anchors:
        draw = ImageDraw.Draw(img)
        for _, text, px, py in anchors:
            x = min(max(px, 4.0), img.width - 4.0)
            y = min(max(py, 4.0), img.height - 4.0)
            draw.ellipse([x - 3, y - 3, x + 3, y + 3], outline=(255, 255, 255, 255), width=1)
            draw.text((x + 6, y - 6), text, fill=(255, 255, 255, 255))
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def frame_event(session: SessionState) -> dict:
    data = encode_session_frame(session)
    frame = session.displayed_frame()
    return {
        "type": "frame",
        "seq": session.next_frame_seq(),
        "width": frame.width,
        "height": frame.height,
        "png_base64": base64.b64encode(data).decode("ascii"),
    }


__all__ = ["encode_session_frame", "frame_event"]
