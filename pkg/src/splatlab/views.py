"""Candidate-view sampling and entropy-based best-view selection.

A frame's informativeness is the Shannon entropy of its alpha channel with
per-pixel probabilities ``p_i = alpha_i / sum(alpha)`` (natural log). Opacity
is used instead of color so the score tracks structural complexity rather
than shading. An all-transparent frame scores 0: it carries no structure and
must never win a ranking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from splatlab.core.types import BasicScene, LightState, Vec3
from splatlab.render.camera import Camera, DEFAULT_FOV_Y
from splatlab.render.image import ImageRGBA
from splatlab.render.rasterizer import flatten_component, render_components

ENTROPY_RESOLUTION = 256  # rankings are resolution-stable; 800x800 is 10x dearer


@dataclass(frozen=True)
class ViewSample:
    camera: Camera
    frame: ImageRGBA
    entropy: float
    frame_index: int


def _pole_aligned_icosahedron() -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    """Icosahedron with vertices at the +z/-z poles and two pentagon rings."""
    verts = [np.array([0.0, 0.0, 1.0])]
    upper_z = 1.0 / math.sqrt(5.0)
    ring_r = 2.0 / math.sqrt(5.0)
    for i in range(5):
        a = 2.0 * math.pi * i / 5.0
        verts.append(np.array([ring_r * math.cos(a), ring_r * math.sin(a), upper_z]))
    for i in range(5):
        a = 2.0 * math.pi * i / 5.0 + math.pi / 5.0
        verts.append(np.array([ring_r * math.cos(a), ring_r * math.sin(a), -upper_z]))
    verts.append(np.array([0.0, 0.0, -1.0]))
    faces: list[tuple[int, int, int]] = []
    for i in range(5):
        j = (i + 1) % 5
        up_i, up_j = 1 + i, 1 + j
        lo_i, lo_j = 6 + i, 6 + j
        faces.append((0, up_i, up_j))
        faces.append((up_i, lo_i, up_j))
        faces.append((lo_i, lo_j, up_j))
        faces.append((11, lo_j, lo_i))
    return np.array(verts), faces


def icosphere_points(frequency: int) -> np.ndarray:
    """Unit geodesic sphere vertices; a frequency-f subdivision has 10f^2+2."""
    if frequency < 1:
        raise ValueError(f"frequency must be >= 1, got {frequency}")
    verts, faces = _pole_aligned_icosahedron()
    seen: dict[tuple, np.ndarray] = {}
    for ia, ib, ic in faces:
        a, b, c = verts[ia], verts[ib], verts[ic]
        for i in range(frequency + 1):
            for j in range(frequency + 1 - i):
                k = frequency - i - j
                p = (i * a + j * b + k * c) / frequency
                p = p / np.linalg.norm(p)
                key = tuple(np.round(p, 9))
                seen.setdefault(key, p)
    points = np.array(list(seen.values()))
    expected = 10 * frequency * frequency + 2
    if len(points) != expected:
        raise RuntimeError(f"icosphere dedup produced {len(points)} points, expected {expected}")
    return points


def fibonacci_sphere_points(count: int) -> np.ndarray:
    """Pole-inclusive spherical Fibonacci lattice; first point is the +z pole."""
    if count == 1:
        return np.array([[0.0, 0.0, 1.0]])
    i = np.arange(count, dtype=float)
    z = 1.0 - 2.0 * i / (count - 1)
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    golden = math.pi * (3.0 - math.sqrt(5.0))
    az = golden * i
    return np.stack([r * np.cos(az), r * np.sin(az), z], axis=1)


def _ordered(points: np.ndarray) -> np.ndarray:
    keys = [(-round(float(p[2]), 9), round(math.atan2(p[1], p[0]), 9)) for p in points]
    order = sorted(range(len(points)), key=lambda i: keys[i])
    return points[order]


def sphere_directions(count: int) -> np.ndarray:
    """``count`` near-uniform unit directions, +z pole first.

    Exact geodesic icosphere counts (10f^2+2: 12, 42, 92, 162, ...) get true
    icosphere sampling; any other count falls back to a spherical Fibonacci
    lattice.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    f = round(math.sqrt((count - 2) / 10.0)) if count >= 12 else 0
    if f >= 1 and 10 * f * f + 2 == count:
        return _ordered(icosphere_points(f))
    return fibonacci_sphere_points(count)


def sample_icosphere_cameras(
    count: int,
    center: Vec3,
    radius: float,
    fov_y: float = DEFAULT_FOV_Y,
    width: int = ENTROPY_RESOLUTION,
    height: int = ENTROPY_RESOLUTION,
) -> list[Camera]:
    """Cameras on a sphere of ``radius`` around ``center``, all looking at it."""
    if count < 1:
        raise ValueError(f"camera count must be >= 1, got {count}")
    if radius <= 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    cameras = []
    for p in sphere_directions(count):
        position = np.asarray(center, dtype=float) + radius * p
        up = (0.0, 1.0, 0.0) if abs(p[1]) < 0.999 else (1.0, 0.0, 0.0)
        cameras.append(
            Camera(tuple(position.tolist()), tuple(center), up, fov_y, width, height)
        )
    return cameras


def image_alpha_entropy(frame: ImageRGBA) -> float:
    """Shannon entropy (nats) of the frame's alpha channel as a distribution."""
    alpha = frame.alpha.astype(np.float64).ravel()
    total = alpha.sum()
    if total <= 0.0:
        return 0.0
    p = alpha / total
    nz = p[p > 0.0]
    return float(-(nz * np.log(nz)).sum())


def select_top_k_views(
    component: BasicScene,
    cameras: Sequence[Camera],
    k: int,
    light: LightState | None = None,
) -> list[ViewSample]:
    """Render the component alone at each camera, rank frames by alpha entropy.

    Returns the top ``k`` samples in descending entropy, ties broken by
    ascending frame index; all frames when ``k`` exceeds the camera count.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not cameras:
        raise ValueError("camera collection must be non-empty")
    light = light or LightState()
    samples = []
    for idx, camera in enumerate(cameras):
        frame, _ = render_components([flatten_component(component)], light, camera)
        samples.append(ViewSample(camera, frame, image_alpha_entropy(frame), idx))
    ranked = sorted(samples, key=lambda s: (-s.entropy, s.frame_index))
    return ranked[: min(k, len(ranked))]


def best_view(
    component: BasicScene, cameras: Sequence[Camera], light: LightState | None = None
) -> ViewSample:
    """The single most informative view (rank-1 entropy sample)."""
    return select_top_k_views(component, cameras, 1, light)[0]


__all__ = [
    "ENTROPY_RESOLUTION",
    "ViewSample",
    "best_view",
    "fibonacci_sphere_points",
    "icosphere_points",
    "image_alpha_entropy",
    "sample_icosphere_cameras",
    "select_top_k_views",
    "sphere_directions",
]
