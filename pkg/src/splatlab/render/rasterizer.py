"""Splat rasterizer: perspective projection, Blinn-Phong shading, front-to-back
alpha compositing into an RGBA framebuffer.

The render model, shared with the test oracles:

* per-splat alpha is ``clamp(w * opacity, 0, 0.99)`` where ``w`` is the 2D
  Gaussian weight ``exp(-0.5 d^T (cov2d)^-1 d)``; contributions below 1/255
  are skipped;
* splats blend front-to-back in (depth, component_id, index) order; once a
  pixel's transmittance drops below 1e-4 it is treated as fully opaque and
  stops accumulating;
* the residual transmittance is filled with the background color and the
  output alpha channel is coverage (1 - transmittance).

Rasterization visits, per splat, an axis-aligned rectangle that covers every
pixel whose alpha can reach the 1/255 floor (at least the 3-sigma extent,
wider for high opacities, plus a one-pixel guard band), so the bounded pass
is exact with respect to an uncropped evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from splatlab.core.ops import covariances_from_scales_rotations, effective_params_arrays
from splatlab.core.types import (
    BasicScene,
    ComponentEdit,
    ComposedScene,
    GaussianPrimitive,
    IDENTITY_EDIT,
    LightState,
    PackedSplats,
    Vec3,
)
from splatlab.errors import InvalidPrimitiveError, RenderError
from splatlab.render.camera import Camera
from splatlab.render.image import ImageRGBA

NEAR_PLANE = 0.01
COV_DILATION = 0.3
ALPHA_CLAMP = 0.99
ALPHA_FLOOR = 1.0 / 255.0
TRANSMITTANCE_FLOOR = 1e-4
SINGULAR_DET = 1e-12
BASE_CUTOFF_SQ = 9.0  # 3-sigma Mahalanobis radius, squared


class RenderMode(str, Enum):
    SHADED = "shaded"
    UNLIT = "unlit"
    ALPHA_HEATMAP = "alpha_heatmap"


@dataclass(frozen=True)
class Splat2D:
    """One primitive projected to the image plane."""

    mean_px: tuple[float, float]
    cov2d: np.ndarray  # (2, 2) symmetric
    depth: float
    color: Vec3
    alpha_base: float
    primitive_ref: tuple[str, int] = ("", 0)

    def __post_init__(self):
        cov = np.asarray(self.cov2d, dtype=float)
        if cov.shape != (2, 2) or abs(cov[0, 1] - cov[1, 0]) > 1e-9:
            raise InvalidPrimitiveError("cov2d must be a symmetric 2x2 matrix")
        if self.depth <= 0:
            raise InvalidPrimitiveError(f"splat depth must be > 0, got {self.depth}")
        object.__setattr__(self, "cov2d", cov)


@dataclass
class RenderStats:
    primitives_in: int = 0
    culled_near: int = 0
    skipped_singular: int = 0
    drawn: int = 0


@dataclass(frozen=True)
class RenderOptions:
    """Per-call overrides; ``None`` falls back to camera size / scene background."""

    width: int | None = None
    height: int | None = None
    background: Vec3 | None = None
    mode: RenderMode = RenderMode.SHADED


@dataclass(frozen=True)
class FlatComponent:
    """One component of a flattened scene, ready for rendering."""

    component_id: str
    palette: Vec3
    packed: PackedSplats
    edit: ComponentEdit


def flatten_scene(
    scene: ComposedScene, edits: dict[str, ComponentEdit] | None = None
) -> list[FlatComponent]:
    edits = edits or {}
    return [
        FlatComponent(
            component_id=comp.component_id,
            palette=comp.palette_color,
            packed=comp.packed,
            edit=edits.get(comp.component_id, IDENTITY_EDIT),
        )
        for comp in scene.components
    ]


def flatten_component(component: BasicScene, edit: ComponentEdit = IDENTITY_EDIT) -> FlatComponent:
    return FlatComponent(component.component_id, component.palette_color, component.packed, edit)


def project_points(mu: np.ndarray, camera: Camera) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Project world points to pixels: (means_px (N,2), depth (N,), valid (N,))."""
    view = camera.world_to_view(mu)
    depth = view[:, 2]
    valid = depth > NEAR_PLANE
    f = camera.focal
    cx, cy = camera.principal
    safe_z = np.where(valid, depth, 1.0)
    means_px = np.stack(
        [f * view[:, 0] / safe_z + cx, f * view[:, 1] / safe_z + cy], axis=1
    )
    return means_px, depth, valid


def project_covariances(
    mu: np.ndarray, cov3d: np.ndarray, camera: Camera, dilation: float = COV_DILATION
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """EWA projection of world covariances to the image plane.

    Returns (means_px, cov2d, depth, valid). ``cov2d = J W cov3d W^T J^T``
    with J the local affine Jacobian of the perspective projection at each
    view-space mean, plus an isotropic low-pass ``dilation`` in pixel space.
    """
    rot = camera.view_rotation()
    view = camera.world_to_view(mu)
    tx, ty, tz = view[:, 0], view[:, 1], view[:, 2]
    valid = tz > NEAR_PLANE
    f = camera.focal
    cx, cy = camera.principal
    safe_z = np.where(valid, tz, 1.0)
    inv_z = 1.0 / safe_z
    inv_z2 = inv_z * inv_z
    n = len(view)
    jac = np.zeros((n, 2, 3))
    jac[:, 0, 0] = f * inv_z
    jac[:, 0, 2] = -f * tx * inv_z2
    jac[:, 1, 1] = f * inv_z
    jac[:, 1, 2] = -f * ty * inv_z2
    m = jac @ rot[None, :, :]
    cov2d = m @ cov3d @ np.swapaxes(m, 1, 2)
    cov2d[:, 0, 0] += dilation
    cov2d[:, 1, 1] += dilation
    means_px = np.stack([f * tx * inv_z + cx, f * ty * inv_z + cy], axis=1)
    return means_px, cov2d, tz, valid


def project_gaussian(
    primitive: GaussianPrimitive,
    camera: Camera,
    dilation: float = COV_DILATION,
    color: Vec3 | None = None,
    alpha_base: float | None = None,
    primitive_ref: tuple[str, int] = ("", 0),
) -> Splat2D | None:
    """Project one primitive; returns ``None`` when it lies behind the near plane.

    ``color``/``alpha_base`` default to the primitive's clipped offset color and
    raw opacity; the scene renderer passes shaded values instead.
    """
    mu = np.asarray(primitive.mu, dtype=float)[None, :]
    cov3d = covariances_from_scales_rotations(
        np.asarray(primitive.scale)[None, :], np.asarray(primitive.rotation)[None, :]
    )
    means_px, cov2d, depth, valid = project_covariances(mu, cov3d, camera, dilation)
    if not valid[0]:
        return None
    if color is None:
        color = tuple(np.clip(primitive.offset_color, 0.0, 1.0).tolist())
    if alpha_base is None:
        alpha_base = primitive.opacity
    return Splat2D(
        mean_px=(float(means_px[0, 0]), float(means_px[0, 1])),
        cov2d=cov2d[0],
        depth=float(depth[0]),
        color=color,
        alpha_base=float(alpha_base),
        primitive_ref=primitive_ref,
    )


def shade_colors(
    base_color: np.ndarray,
    coeffs: np.ndarray,
    normals: np.ndarray,
    light: LightState,
    camera: Camera,
) -> np.ndarray:
    """Blinn-Phong over packed primitives; returns (N, 3) colors in [0, 1].

    Ambient and diffuse scale the base color; specular is added as a white
    highlight. ``0^0 == 1`` (numpy convention), so a zero shininess with a
    grazing half-vector yields the full specular coefficient.
    """
    view_dir = np.asarray(camera.view_direction())
    light_dir = np.asarray(light.direction(tuple(view_dir.tolist())))
    half = light_dir + view_dir
    norm = np.linalg.norm(half)
    half = light_dir if norm < 1e-12 else half / norm
    n_dot_l = np.maximum(0.0, normals @ light_dir)
    n_dot_h = np.maximum(0.0, normals @ half)
    mag = light.magnitude
    gain = coeffs[:, 0] + coeffs[:, 1] * n_dot_l * mag
    specular = coeffs[:, 2] * np.power(n_dot_h, coeffs[:, 3]) * mag
    return np.clip(base_color * gain[:, None] + specular[:, None], 0.0, 1.0)


def shade_primitive(
    base_color: Vec3,
    coeffs: tuple[float, float, float, float],
    normal: Vec3,
    light: LightState,
    camera: Camera,
) -> Vec3:
    """Shade a single primitive (see :func:`shade_colors`)."""
    rgb = shade_colors(
        np.asarray(base_color, dtype=float)[None, :],
        np.asarray(coeffs, dtype=float)[None, :],
        np.asarray(normal, dtype=float)[None, :],
        light,
        camera,
    )
    return tuple(rgb[0].tolist())


def composite_pixel(
    contributions: Iterable[tuple[Vec3, float]]
) -> tuple[Vec3, float]:
    """Blend front-to-back ordered (color, alpha) layers for one pixel.

    Transmittance below ``TRANSMITTANCE_FLOOR`` is treated as fully opaque
    and terminates the blend.
    """
    rgb = np.zeros(3)
    transmittance = 1.0
    for color, alpha in contributions:
        if not 0.0 <= alpha <= 1.0:
            raise InvalidPrimitiveError(f"layer alpha must be in [0, 1], got {alpha}")
        rgb += np.asarray(color, dtype=float) * (alpha * transmittance)
        transmittance *= 1.0 - alpha
        if transmittance < TRANSMITTANCE_FLOOR:
            transmittance = 0.0
            break
    return tuple(rgb.tolist()), 1.0 - transmittance


def render_components(
    components: Sequence[FlatComponent],
    light: LightState,
    camera: Camera,
    background: Vec3 = (0.0, 0.0, 0.0),
    mode: RenderMode = RenderMode.SHADED,
) -> tuple[ImageRGBA, RenderStats]:
    """Render a flattened component list; the core path behind :func:`render`.

    Deterministic for fixed inputs: splats are sorted by
    (depth, component_id, index) so the output does not depend on the input
    component ordering.
    """
    width = camera.width
    height = camera.height
    stats = RenderStats()

    mu_parts: list[np.ndarray] = []
    cov_parts: list[np.ndarray] = []
    color_parts: list[np.ndarray] = []
    opacity_parts: list[np.ndarray] = []
    rank_parts: list[np.ndarray] = []
    index_parts: list[np.ndarray] = []

    id_rank = {cid: i for i, cid in enumerate(sorted({c.component_id for c in components}))}
    for comp in components:
        packed = comp.packed
        n = len(packed.opacity)
        stats.primitives_in += n
        base, opacity, coeffs = effective_params_arrays(
            packed.opacity, packed.offset_color, packed.coeffs, comp.palette, comp.edit
        )
        if mode is RenderMode.UNLIT:
            colors = base
        elif mode is RenderMode.ALPHA_HEATMAP:
            colors = np.ones((n, 3))
        else:
            colors = shade_colors(base, coeffs, packed.normal, light, camera)
        mu_parts.append(packed.mu)
        cov_parts.append(covariances_from_scales_rotations(packed.scale, packed.rotation))
        color_parts.append(colors)
        opacity_parts.append(opacity)
        rank_parts.append(np.full(n, id_rank[comp.component_id], dtype=np.int64))
        index_parts.append(np.arange(n, dtype=np.int64))

    if not mu_parts:
        raise RenderError("cannot render an empty scene")

    mu = np.concatenate(mu_parts)
    cov3d = np.concatenate(cov_parts)
    colors = np.concatenate(color_parts)
    opacity = np.concatenate(opacity_parts)
    ranks = np.concatenate(rank_parts)
    indices = np.concatenate(index_parts)

    means_px, cov2d, depth, valid = project_covariances(mu, cov3d, camera)
    stats.culled_near = int(np.count_nonzero(~valid))

    det = cov2d[:, 0, 0] * cov2d[:, 1, 1] - cov2d[:, 0, 1] ** 2
    singular = valid & (det < SINGULAR_DET)
    stats.skipped_singular = int(np.count_nonzero(singular))
    keep = valid & ~singular & (opacity >= ALPHA_FLOOR)

    order = np.lexsort((indices[keep], ranks[keep], depth[keep]))
    kept = np.flatnonzero(keep)[order]
    stats.drawn = len(kept)

    color_acc = np.zeros((height, width, 3))
    transmittance = np.ones((height, width))

    xs = np.arange(width) + 0.5
    ys = np.arange(height) + 0.5

    for i in kept:
        o = opacity[i]
        c11 = cov2d[i, 0, 0]
        c12 = cov2d[i, 0, 1]
        c22 = cov2d[i, 1, 1]
        d = det[i]
        inv_a = c22 / d
        inv_b = -c12 / d
        inv_c = c11 / d
        # rectangle covering every pixel that can reach the alpha floor
        cutoff_sq = max(BASE_CUTOFF_SQ, 2.0 * math.log(o / ALPHA_FLOOR))
        radius = math.sqrt(cutoff_sq)
        hx = radius * math.sqrt(c11)
        hy = radius * math.sqrt(c22)
        mx, my = means_px[i]
        x0 = max(0, int(math.floor(mx - hx)) - 1)
        x1 = min(width, int(math.ceil(mx + hx)) + 2)
        y0 = max(0, int(math.floor(my - hy)) - 1)
        y1 = min(height, int(math.ceil(my + hy)) + 2)
        if x0 >= x1 or y0 >= y1:
            continue
        t_sub = transmittance[y0:y1, x0:x1]
        if not t_sub.any():
            continue
        dx = xs[x0:x1] - mx
        dy = ys[y0:y1] - my
        quad = (
            inv_a * (dx * dx)[None, :]
            + inv_c * (dy * dy)[:, None]
            + (2.0 * inv_b) * dy[:, None] * dx[None, :]
        )
        alpha = np.minimum(np.exp(-0.5 * quad) * o, ALPHA_CLAMP)
        alpha[alpha < ALPHA_FLOOR] = 0.0
        weighted = alpha * t_sub
        color_acc[y0:y1, x0:x1] += weighted[:, :, None] * colors[i][None, None, :]
        t_sub *= 1.0 - alpha
        t_sub[t_sub < TRANSMITTANCE_FLOOR] = 0.0

    bg = np.asarray(background, dtype=float)
    out = np.empty((height, width, 4))
    out[:, :, :3] = color_acc + transmittance[:, :, None] * bg[None, None, :]
    out[:, :, 3] = 1.0 - transmittance
    frame = ImageRGBA(np.clip(out, 0.0, 1.0).astype(np.float32))
    return frame, stats


def render_with_stats(
    scene: ComposedScene,
    edits: dict[str, ComponentEdit] | None,
    camera: Camera,
    options: RenderOptions = RenderOptions(),
) -> tuple[ImageRGBA, RenderStats]:
    if options.width is not None or options.height is not None:
        camera = camera.with_size(options.width or camera.width, options.height or camera.height)
    background = options.background if options.background is not None else scene.background
    return render_components(
        flatten_scene(scene, edits), scene.global_light, camera, background, options.mode
    )


def render(
    scene: ComposedScene,
    edits: dict[str, ComponentEdit] | None,
    camera: Camera,
    options: RenderOptions = RenderOptions(),
) -> ImageRGBA:
    """Render a composed scene under per-component edits to an RGBA frame."""
    frame, _ = render_with_stats(scene, edits, camera, options)
    return frame


__all__ = [
    "ALPHA_CLAMP",
    "ALPHA_FLOOR",
    "COV_DILATION",
    "NEAR_PLANE",
    "SINGULAR_DET",
    "TRANSMITTANCE_FLOOR",
    "FlatComponent",
    "RenderMode",
    "RenderOptions",
    "RenderStats",
    "Splat2D",
    "composite_pixel",
    "flatten_component",
    "flatten_scene",
    "project_covariances",
    "project_gaussian",
    "project_points",
    "render",
    "render_components",
    "render_with_stats",
    "shade_colors",
    "shade_primitive",
]
