"""Domain types for editable Gaussian primitives and composed scenes.

All types are immutable values: scalar/tuple fields, validated on
construction. The rasterizer packs scenes into numpy arrays lazily (see
:meth:`BasicScene.packed`), so per-primitive objects stay cheap to build
and compare while rendering stays vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Sequence

import numpy as np

from splatlab.errors import InvalidPrimitiveError, SceneCompositionError

Vec3 = tuple[float, float, float]
Vec4 = tuple[float, float, float, float]

_UNIT_NORM_TOL = 1e-6


def _as_vec(value: Sequence[float], n: int, name: str) -> tuple[float, ...]:
    try:
        vec = tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise InvalidPrimitiveError(f"{name} must be a sequence of {n} numbers") from exc
    if len(vec) != n:
        raise InvalidPrimitiveError(f"{name} must have {n} components, got {len(vec)}")
    if not all(math.isfinite(v) for v in vec):
        raise InvalidPrimitiveError(f"{name} has non-finite components: {vec}")
    return vec


def _check_unit(vec: tuple[float, ...], name: str, tol: float = _UNIT_NORM_TOL) -> None:
    norm = math.sqrt(sum(v * v for v in vec))
    if abs(norm - 1.0) > tol:
        raise InvalidPrimitiveError(f"{name} must be unit length (norm={norm:.9f})")


def _check_range(value: float, lo: float, hi: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or not (lo <= value <= hi):
        raise InvalidPrimitiveError(f"{name} must be in [{lo}, {hi}], got {value}")
    return value


@dataclass(frozen=True)
class GaussianPrimitive:
    """One editable splat: geometry plus shading attributes.

    Geometry: position ``mu``, per-axis ``scale`` (> 0), unit quaternion
    ``rotation`` (w, x, y, z) and base ``opacity``. Shading: unit ``normal``,
    per-primitive ``offset_color`` residual in [-1, 1]^3 added to the
    component palette color, reflection coefficients in [0, 1] and a
    ``shininess`` exponent >= 0.
    """

    mu: Vec3
    scale: Vec3
    rotation: Vec4 = (1.0, 0.0, 0.0, 0.0)
    opacity: float = 1.0
    normal: Vec3 = (0.0, 0.0, 1.0)
    offset_color: Vec3 = (0.0, 0.0, 0.0)
    k_ambient: float = 0.3
    k_diffuse: float = 0.6
    k_specular: float = 0.1
    shininess: float = 16.0

    def __post_init__(self):
        object.__setattr__(self, "mu", _as_vec(self.mu, 3, "mu"))
        scale = _as_vec(self.scale, 3, "scale")
        if any(s <= 0 for s in scale):
            raise InvalidPrimitiveError(f"scale components must be > 0, got {scale}")
        object.__setattr__(self, "scale", scale)
        rotation = _as_vec(self.rotation, 4, "rotation")
        _check_unit(rotation, "rotation")
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "opacity", _check_range(self.opacity, 0.0, 1.0, "opacity"))
        normal = _as_vec(self.normal, 3, "normal")
        _check_unit(normal, "normal")
        object.__setattr__(self, "normal", normal)
        offset = _as_vec(self.offset_color, 3, "offset_color")
        if any(not -1.0 <= c <= 1.0 for c in offset):
            raise InvalidPrimitiveError(f"offset_color must be in [-1, 1]^3, got {offset}")
        object.__setattr__(self, "offset_color", offset)
        object.__setattr__(self, "k_ambient", _check_range(self.k_ambient, 0.0, 1.0, "k_ambient"))
        object.__setattr__(self, "k_diffuse", _check_range(self.k_diffuse, 0.0, 1.0, "k_diffuse"))
        object.__setattr__(self, "k_specular", _check_range(self.k_specular, 0.0, 1.0, "k_specular"))
        shininess = float(self.shininess)
        if not math.isfinite(shininess) or shininess < 0:
            raise InvalidPrimitiveError(f"shininess must be >= 0, got {shininess}")
        object.__setattr__(self, "shininess", shininess)


class LightMode(str, Enum):
    HEADLIGHT = "headlight"
    ORBITAL = "orbital"


@dataclass(frozen=True)
class LightState:
    """Global light: direction from (azimuth, polar) plus a magnitude.

    In headlight mode the light direction follows the camera view direction
    and the angles are ignored.
    """

    azimuth: float = 0.0
    polar: float = 0.0
    magnitude: float = 1.0
    mode: LightMode = LightMode.HEADLIGHT

    def __post_init__(self):
        if not math.isfinite(self.magnitude) or self.magnitude < 0:
            raise InvalidPrimitiveError(f"light magnitude must be >= 0, got {self.magnitude}")
        if not 0.0 <= self.polar <= math.pi:
            raise InvalidPrimitiveError(f"polar angle must be in [0, pi], got {self.polar}")
        object.__setattr__(self, "mode", LightMode(self.mode))

    def direction(self, view_dir: Vec3) -> Vec3:
        """Unit direction toward the light. ``view_dir`` is the unit vector
        from the scene toward the camera, used in headlight mode."""
        if self.mode is LightMode.HEADLIGHT:
            return view_dir
        sp = math.sin(self.polar)
        return (sp * math.cos(self.azimuth), sp * math.sin(self.azimuth), math.cos(self.polar))


@dataclass(frozen=True)
class ComponentEdit:
    """Live edit state for one component.

    ``opacity_scale`` multiplies per-primitive opacity (clamped to [0, 1]
    downstream; values up to 2 let faint components be brightened).
    ``light_gains`` multiply (k_ambient, k_diffuse, k_specular, shininess).
    An invisible component renders with zero opacity; primitives are never
    removed, which keeps logging and reset stable.
    """

    color_override: Vec3 | None = None
    opacity_scale: float = 1.0
    visible: bool = True
    light_gains: Vec4 = (1.0, 1.0, 1.0, 1.0)

    def __post_init__(self):
        if self.color_override is not None:
            override = _as_vec(self.color_override, 3, "color_override")
            if any(not 0.0 <= c <= 1.0 for c in override):
                raise InvalidPrimitiveError(f"color_override must be in [0, 1]^3, got {override}")
            object.__setattr__(self, "color_override", override)
        object.__setattr__(
            self, "opacity_scale", _check_range(self.opacity_scale, 0.0, 2.0, "opacity_scale")
        )
        gains = _as_vec(self.light_gains, 4, "light_gains")
        if any(not 0.0 <= g <= 4.0 for g in gains):
            raise InvalidPrimitiveError(f"light_gains must be in [0, 4], got {gains}")
        object.__setattr__(self, "light_gains", gains)
        object.__setattr__(self, "visible", bool(self.visible))

    @property
    def is_identity(self) -> bool:
        return (
            self.color_override is None
            and self.opacity_scale == 1.0
            and self.visible
            and self.light_gains == (1.0, 1.0, 1.0, 1.0)
        )


IDENTITY_EDIT = ComponentEdit()


@dataclass(frozen=True)
class BoundingSphere:
    center: Vec3
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_vec(self.center, 3, "bounding sphere center"))
        if not math.isfinite(self.radius) or self.radius < 0:
            raise InvalidPrimitiveError(f"bounding sphere radius must be >= 0, got {self.radius}")


@dataclass(frozen=True)
class PackedSplats:
    """Struct-of-arrays view of a primitive collection (float64)."""

    mu: np.ndarray          # (N, 3)
    scale: np.ndarray       # (N, 3)
    rotation: np.ndarray    # (N, 4)
    opacity: np.ndarray     # (N,)
    normal: np.ndarray      # (N, 3)
    offset_color: np.ndarray  # (N, 3)
    coeffs: np.ndarray      # (N, 4): k_ambient, k_diffuse, k_specular, shininess


def pack_primitives(primitives: Sequence[GaussianPrimitive]) -> PackedSplats:
    n = len(primitives)
    mu = np.empty((n, 3))
    scale = np.empty((n, 3))
    rotation = np.empty((n, 4))
    opacity = np.empty(n)
    normal = np.empty((n, 3))
    offset = np.empty((n, 3))
    coeffs = np.empty((n, 4))
    for i, p in enumerate(primitives):
        mu[i] = p.mu
        scale[i] = p.scale
        rotation[i] = p.rotation
        opacity[i] = p.opacity
        normal[i] = p.normal
        offset[i] = p.offset_color
        coeffs[i] = (p.k_ambient, p.k_diffuse, p.k_specular, p.shininess)
    return PackedSplats(mu, scale, rotation, opacity, normal, offset, coeffs)


@dataclass(frozen=True)
class BasicScene:
    """One segmented component: its own primitive set plus a palette color
    shared by every primitive of the component."""

    component_id: str
    label: str
    palette_color: Vec3
    primitives: tuple[GaussianPrimitive, ...]
    bounding_sphere: BoundingSphere | None = None

    def __post_init__(self):
        if not self.component_id:
            raise SceneCompositionError("component_id must be non-empty")
        palette = _as_vec(self.palette_color, 3, "palette_color")
        if any(not 0.0 <= c <= 1.0 for c in palette):
            raise InvalidPrimitiveError(f"palette_color must be in [0, 1]^3, got {palette}")
        object.__setattr__(self, "palette_color", palette)
        prims = tuple(self.primitives)
        if not prims:
            raise SceneCompositionError(f"component {self.component_id!r} has no primitives")
        object.__setattr__(self, "primitives", prims)
        if self.bounding_sphere is None:
            object.__setattr__(self, "bounding_sphere", _sphere_around(prims))
        else:
            self._check_enclosure()

    def _check_enclosure(self):
        sphere = self.bounding_sphere
        assert sphere is not None
        center = np.asarray(sphere.center)
        for p in self.primitives:
            if np.linalg.norm(np.asarray(p.mu) - center) > sphere.radius * (1 + 1e-9) + 1e-9:
                raise SceneCompositionError(
                    f"bounding sphere of {self.component_id!r} does not enclose all primitives"
                )

    @cached_property
    def packed(self) -> PackedSplats:
        return pack_primitives(self.primitives)

    def __len__(self) -> int:
        return len(self.primitives)


def _sphere_around(primitives: Sequence[GaussianPrimitive]) -> BoundingSphere:
    mu = np.array([p.mu for p in primitives])
    center = mu.mean(axis=0)
    radius = float(np.max(np.linalg.norm(mu - center, axis=1))) if len(mu) else 0.0
    return BoundingSphere(tuple(center.tolist()), radius)


@dataclass(frozen=True)
class ComposedScene:
    """Full scene: ordered components with a global light and background."""

    components: tuple[BasicScene, ...]
    global_light: LightState = field(default_factory=LightState)
    background: Vec3 = (0.0, 0.0, 0.0)

    def __post_init__(self):
        components = tuple(self.components)
        seen: set[str] = set()
        for comp in components:
            if comp.component_id in seen:
                raise SceneCompositionError(f"duplicate component id {comp.component_id!r}")
            seen.add(comp.component_id)
        object.__setattr__(self, "components", components)
        bg = _as_vec(self.background, 3, "background")
        if any(not 0.0 <= c <= 1.0 for c in bg):
            raise InvalidPrimitiveError(f"background must be in [0, 1]^3, got {bg}")
        object.__setattr__(self, "background", bg)

    def component_ids(self) -> tuple[str, ...]:
        return tuple(c.component_id for c in self.components)

    def component(self, component_id: str) -> BasicScene:
        for comp in self.components:
            if comp.component_id == component_id:
                return comp
        raise KeyError(component_id)

    def bounding_sphere(self) -> BoundingSphere:
        centers = np.array([c.bounding_sphere.center for c in self.components])
        radii = np.array([c.bounding_sphere.radius for c in self.components])
        center = centers.mean(axis=0)
        radius = float(np.max(np.linalg.norm(centers - center, axis=1) + radii))
        return BoundingSphere(tuple(center.tolist()), radius)

    def with_light(self, light: LightState) -> "ComposedScene":
        return replace(self, global_light=light)

    def __len__(self) -> int:
        return sum(len(c) for c in self.components)


def identity_edits(scene: ComposedScene) -> dict[str, ComponentEdit]:
    return {c.component_id: IDENTITY_EDIT for c in scene.components}


def edits_for(scene: ComposedScene, overrides: dict[str, ComponentEdit] | None = None
              ) -> dict[str, ComponentEdit]:
    """Identity edit map for ``scene`` with ``overrides`` applied."""
    edits = identity_edits(scene)
    if overrides:
        for cid, edit in overrides.items():
            if cid not in edits:
                raise KeyError(cid)
            edits[cid] = edit
    return edits


__all__ = [
    "Vec3",
    "Vec4",
    "GaussianPrimitive",
    "LightMode",
    "LightState",
    "ComponentEdit",
    "IDENTITY_EDIT",
    "BoundingSphere",
    "PackedSplats",
    "pack_primitives",
    "BasicScene",
    "ComposedScene",
    "identity_edits",
    "edits_for",
]
