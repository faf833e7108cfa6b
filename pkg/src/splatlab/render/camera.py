"""Pinhole camera with a look-at pose.

View space follows the image convention: +x right, +y down, +z into the
screen, so depth of a visible point is positive and pixel coordinates come
straight out of the intrinsics without a flip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from splatlab.core.types import Vec3, _as_vec
from splatlab.errors import InvalidCameraError

DEFAULT_WIDTH = 800
DEFAULT_HEIGHT = 800
DEFAULT_FOV_Y = math.pi / 4


@dataclass(frozen=True)
class Camera:
    position: Vec3
    target: Vec3
    up: Vec3 = (0.0, 1.0, 0.0)
    fov_y: float = DEFAULT_FOV_Y
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT

    def __post_init__(self):
        object.__setattr__(self, "position", _as_vec(self.position, 3, "position"))
        object.__setattr__(self, "target", _as_vec(self.target, 3, "target"))
        object.__setattr__(self, "up", _as_vec(self.up, 3, "up"))
        if self.position == self.target:
            raise InvalidCameraError("camera position must differ from target")
        if not 0.0 < self.fov_y < math.pi:
            raise InvalidCameraError(f"fov_y must be in (0, pi), got {self.fov_y}")
        if self.width < 1 or self.height < 1:
            raise InvalidCameraError("width and height must be >= 1")
        forward = np.asarray(self.target) - np.asarray(self.position)
        if np.linalg.norm(np.cross(forward, np.asarray(self.up))) < 1e-12:
            raise InvalidCameraError("up vector is collinear with the view direction")

    @property
    def focal(self) -> float:
        """Focal length in pixels (square pixels, vertical fov)."""
        return (self.height / 2.0) / math.tan(self.fov_y / 2.0)

    @property
    def principal(self) -> tuple[float, float]:
        return (self.width / 2.0, self.height / 2.0)

    def view_rotation(self) -> np.ndarray:
        """World-to-view rotation; rows are (right, down, forward)."""
        pos = np.asarray(self.position, dtype=float)
        fwd = np.asarray(self.target, dtype=float) - pos
        fwd = fwd / np.linalg.norm(fwd)
        right = np.cross(fwd, np.asarray(self.up, dtype=float))
        right = right / np.linalg.norm(right)
        down = np.cross(fwd, right)
        return np.stack([right, down, fwd])

    def world_to_view(self, points: np.ndarray) -> np.ndarray:
        rot = self.view_rotation()
        return (np.atleast_2d(points) - np.asarray(self.position)) @ rot.T

    def view_direction(self) -> Vec3:
        """Unit vector from the target toward the camera."""
        v = np.asarray(self.position, dtype=float) - np.asarray(self.target, dtype=float)
        v = v / np.linalg.norm(v)
        return tuple(v.tolist())

    def with_size(self, width: int, height: int) -> "Camera":
        return replace(self, width=width, height=height)


def orbit_camera(
    target: Vec3,
    distance: float,
    azimuth: float,
    polar: float,
    fov_y: float = DEFAULT_FOV_Y,
    width: int = DEFAULT_WIDTH,
    height: int = DEFAULT_HEIGHT,
) -> Camera:
    """Camera on a sphere around ``target``; polar measured from +z."""
    if distance <= 0:
        raise InvalidCameraError(f"orbit distance must be > 0, got {distance}")
    sp = math.sin(polar)
    offset = np.array([sp * math.cos(azimuth), sp * math.sin(azimuth), math.cos(polar)])
    position = np.asarray(target) + distance * offset
    up = (0.0, 1.0, 0.0) if abs(offset[1]) < 0.999 else (1.0, 0.0, 0.0)
    return Camera(tuple(position.tolist()), tuple(target), up, fov_y, width, height)


def camera_spherical(camera: Camera) -> tuple[float, float, float]:
    """(azimuth, polar, distance) of the camera position about its target."""
    offset = np.asarray(camera.position) - np.asarray(camera.target)
    distance = float(np.linalg.norm(offset))
    unit = offset / distance
    polar = math.acos(max(-1.0, min(1.0, unit[2])))
    azimuth = math.atan2(unit[1], unit[0])
    return azimuth, polar, distance


__all__ = [
    "Camera",
    "orbit_camera",
    "camera_spherical",
    "DEFAULT_WIDTH",
    "DEFAULT_HEIGHT",
    "DEFAULT_FOV_Y",
]
