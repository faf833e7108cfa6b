"""Scene-level operations: covariance construction, composition, edit application."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from splatlab.core.types import (
    BasicScene,
    ComponentEdit,
    ComposedScene,
    GaussianPrimitive,
    Vec3,
)
from splatlab.errors import InvalidPrimitiveError, SceneCompositionError

QUAT_NORM_TOL = 1e-3


def rotation_matrices(quaternions: np.ndarray) -> np.ndarray:
    """Batch of rotation matrices from (w, x, y, z) quaternions, shape (N, 4) -> (N, 3, 3).

    Quaternions are renormalized; the construction is quadratic in the
    components, so q and -q yield the same matrix exactly.
    """
    q = np.asarray(quaternions, dtype=float)
    single = q.ndim == 1
    q = np.atleast_2d(q)
    if not np.all(np.isfinite(q)):
        raise InvalidPrimitiveError("rotation quaternion has non-finite components")
    norms = np.linalg.norm(q, axis=1)
    if np.any(np.abs(norms - 1.0) > QUAT_NORM_TOL):
        raise InvalidPrimitiveError("rotation quaternion norm deviates from 1 beyond tolerance")
    q = q / norms[:, None]
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    mats = np.empty((len(q), 3, 3))
    mats[:, 0, 0] = 1 - 2 * (y * y + z * z)
    mats[:, 0, 1] = 2 * (x * y - w * z)
    mats[:, 0, 2] = 2 * (x * z + w * y)
    mats[:, 1, 0] = 2 * (x * y + w * z)
    mats[:, 1, 1] = 1 - 2 * (x * x + z * z)
    mats[:, 1, 2] = 2 * (y * z - w * x)
    mats[:, 2, 0] = 2 * (x * z - w * y)
    mats[:, 2, 1] = 2 * (y * z + w * x)
    mats[:, 2, 2] = 1 - 2 * (x * x + y * y)
    return mats[0] if single else mats


def covariances_from_scales_rotations(scales: np.ndarray, rotations: np.ndarray) -> np.ndarray:
    """World-space covariances R diag(s)^2 R^T, shape (N, 3) x (N, 4) -> (N, 3, 3)."""
    s = np.atleast_2d(np.asarray(scales, dtype=float))
    if not np.all(np.isfinite(s)):
        raise InvalidPrimitiveError("scale has non-finite components")
    if np.any(s <= 0):
        raise InvalidPrimitiveError("scale components must be > 0")
    rot = rotation_matrices(np.atleast_2d(np.asarray(rotations, dtype=float)))
    # R diag(s^2) R^T == (R * s^2) R^T with s^2 broadcast over columns
    scaled = rot * (s**2)[:, None, :]
    return scaled @ np.swapaxes(rot, 1, 2)


def covariance_from_scale_rotation(scale: Sequence[float], rotation: Sequence[float]) -> np.ndarray:
    """3x3 symmetric PSD covariance of one Gaussian from its scale and rotation."""
    return covariances_from_scales_rotations(
        np.asarray(scale, dtype=float)[None, :], np.asarray(rotation, dtype=float)[None, :]
    )[0]


def compose_scenes(components: Sequence[BasicScene], **kwargs) -> ComposedScene:
    """Compose basic scenes into one scene by concatenating their primitive sets.

    Inputs are kept as-is (immutably referenced); duplicate component ids are
    rejected naming the offender.
    """
    seen: set[str] = set()
    for comp in components:
        if comp.component_id in seen:
            raise SceneCompositionError(f"duplicate component id {comp.component_id!r}")
        seen.add(comp.component_id)
    return ComposedScene(components=tuple(components), **kwargs)


def effective_params_arrays(
    opacity: np.ndarray,
    offset_color: np.ndarray,
    coeffs: np.ndarray,
    palette: Vec3,
    edit: ComponentEdit,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Apply a component edit to packed primitive attributes.

    Returns (base_color (N,3) in [0,1], effective_opacity (N,) in [0,1],
    coefficients (N,4) gain-scaled). Invisible components annihilate opacity.
    """
    chosen = np.asarray(edit.color_override if edit.color_override is not None else palette)
    base_color = np.clip(chosen[None, :] + offset_color, 0.0, 1.0)
    if edit.visible:
        eff_opacity = np.clip(opacity * edit.opacity_scale, 0.0, 1.0)
    else:
        eff_opacity = np.zeros_like(opacity)
    eff_coeffs = coeffs * np.asarray(edit.light_gains)[None, :]
    return base_color, eff_opacity, eff_coeffs


def effective_params(
    primitive: GaussianPrimitive, palette: Vec3, edit: ComponentEdit
) -> tuple[Vec3, float, tuple[float, float, float, float]]:
    """Render-time parameters of one primitive under a component edit."""
    base, opacity, coeffs = effective_params_arrays(
        np.array([primitive.opacity]),
        np.array([primitive.offset_color]),
        np.array([(primitive.k_ambient, primitive.k_diffuse, primitive.k_specular,
                   primitive.shininess)]),
        palette,
        edit,
    )
    return tuple(base[0].tolist()), float(opacity[0]), tuple(coeffs[0].tolist())


__all__ = [
    "rotation_matrices",
    "covariances_from_scales_rotations",
    "covariance_from_scale_rotation",
    "compose_scenes",
    "effective_params",
    "effective_params_arrays",
]
