"""Synthetic scene generation: analytic shapes as editable splat components.

Stands in everywhere tests need a scene: analytic surfaces give checkable
normals and silhouettes, and generation is a pure function of (recipe, seed),
so saved bundles are byte-identical across runs. All primitive fields pass
through float32 so in-memory scenes round-trip the on-disk format bitwise.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from splatlab.core.types import ComposedScene, LightState, Vec3
from splatlab.io.bundle import RECORD_FIELDS, SceneBundle, array_to_primitives
from splatlab.knowledge import KnowledgeBase, KnowledgeEntry
from splatlab.core.types import BasicScene
from splatlab.render.camera import DEFAULT_FOV_Y, orbit_camera
from splatlab.render.rasterizer import render

SHAPE_KINDS = ("sphere_shell", "box", "torus")

_SHADING = (0.35, 0.55, 0.12, 24.0)  # k_ambient, k_diffuse, k_specular, shininess
_SPACING_FACTOR = 0.7  # splat radius relative to mean surface point spacing


@dataclass(frozen=True)
class ShapeSpec:
    kind: str
    label: str
    palette_color: Vec3
    count: int
    center: Vec3 = (0.0, 0.0, 0.0)
    size: float = 1.0  # sphere radius / box half-extent / torus major radius
    minor_radius: float = 0.3  # torus tube radius
    component_id: str = ""

    def resolved_id(self, fallback: str) -> str:
        if self.component_id:
            return self.component_id
        slug = re.sub(r"[^a-z0-9]+", "_", self.label.lower()).strip("_")
        return slug or fallback


@dataclass(frozen=True)
class SceneRecipe:
    scene_id: str
    shapes: tuple[ShapeSpec, ...]
    seed: int = 0
    background: Vec3 = (0.0, 0.0, 0.0)
    light: LightState = field(default_factory=LightState)
    knowledge: tuple[KnowledgeEntry, ...] = ()
    frame_width: int = 800
    frame_height: int = 800


def _sphere_points(rng: np.random.Generator, n: int, center, radius: float):
    dirs = rng.standard_normal((n, 3))
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    norms[norms < 1e-12] = 1.0
    dirs = dirs / norms
    mu = np.asarray(center) + radius * dirs
    area = 4.0 * math.pi * radius * radius
    return mu, dirs, area


def _box_points(rng: np.random.Generator, n: int, center, half: float):
    faces = rng.integers(0, 6, n)
    uv = rng.uniform(-half, half, (n, 2))
    mu = np.empty((n, 3))
    normals = np.zeros((n, 3))
    for face in range(6):
        mask = faces == face
        axis, sign = divmod(face, 2)
        sign = 1.0 if sign == 0 else -1.0
        others = [a for a in range(3) if a != axis]
        mu[mask, axis] = sign * half
        mu[mask, others[0]] = uv[mask, 0]
        mu[mask, others[1]] = uv[mask, 1]
        normals[mask, axis] = sign
    area = 24.0 * half * half
    return np.asarray(center) + mu, normals, area


def _torus_points(rng: np.random.Generator, n: int, center, major: float, minor: float):
    theta = rng.uniform(0.0, 2.0 * math.pi, n)
    # rejection-sample the tube angle so points are uniform on the surface
    phi = np.empty(n)
    filled = 0
    while filled < n:
        cand = rng.uniform(0.0, 2.0 * math.pi, 2 * (n - filled))
        accept_p = (major + minor * np.cos(cand)) / (major + minor)
        keep = cand[rng.uniform(0.0, 1.0, len(cand)) < accept_p]
        take = min(len(keep), n - filled)
        phi[filled : filled + take] = keep[:take]
        filled += take
    cos_p, sin_p = np.cos(phi), np.sin(phi)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    ring = major + minor * cos_p
    mu = np.stack([ring * cos_t, ring * sin_t, minor * sin_p], axis=1)
    normals = np.stack([cos_p * cos_t, cos_p * sin_t, sin_p], axis=1)
    area = 4.0 * math.pi * math.pi * major * minor
    return np.asarray(center) + mu, normals, area


def _build_component(spec: ShapeSpec, index: int, rng: np.random.Generator) -> BasicScene:
    if spec.count < 1:
        raise ValueError(f"shape {spec.label!r} has a zero primitive budget")
    if spec.kind not in SHAPE_KINDS:
        raise ValueError(f"unknown shape kind {spec.kind!r}; expected one of {SHAPE_KINDS}")
    if spec.kind == "sphere_shell":
        mu, normals, area = _sphere_points(rng, spec.count, spec.center, spec.size)
    elif spec.kind == "box":
        mu, normals, area = _box_points(rng, spec.count, spec.center, spec.size)
    else:
        mu, normals, area = _torus_points(
            rng, spec.count, spec.center, spec.size, spec.minor_radius
        )
    spacing = math.sqrt(area / spec.count)
    scale = max(1e-4, spacing * _SPACING_FACTOR)

    n = spec.count
    arr = np.empty((n, RECORD_FIELDS))
    arr[:, 0:3] = mu
    arr[:, 3:6] = scale
    arr[:, 6:10] = (1.0, 0.0, 0.0, 0.0)
    arr[:, 10] = rng.uniform(0.55, 0.9, n)
    arr[:, 11:14] = normals
    arr[:, 14:17] = rng.uniform(-0.05, 0.05, (n, 3))
    arr[:, 17:21] = _SHADING
    primitives = array_to_primitives(arr.astype(np.float32))
    return BasicScene(
        component_id=spec.resolved_id(f"component_{index}"),
        label=spec.label,
        palette_color=spec.palette_color,
        primitives=primitives,
    )


def generate_synthetic_scene(recipe: SceneRecipe) -> SceneBundle:
    """Build a full scene bundle deterministically from a recipe."""
    if not recipe.shapes:
        raise ValueError("recipe must list at least one shape")
    rng = np.random.default_rng(recipe.seed)
    components = tuple(
        _build_component(spec, i, rng) for i, spec in enumerate(recipe.shapes)
    )
    scene = ComposedScene(
        components=components, global_light=recipe.light, background=recipe.background
    )
    sphere = scene.bounding_sphere()
    distance = max(sphere.radius, 1e-3) / math.sin(DEFAULT_FOV_Y / 2.0) * 1.4
    camera = orbit_camera(
        sphere.center,
        distance,
        azimuth=0.9,
        polar=1.15,
        fov_y=DEFAULT_FOV_Y,
        width=recipe.frame_width,
        height=recipe.frame_height,
    )
    golden = render(scene, None, camera)
    return SceneBundle(
        scene_id=recipe.scene_id,
        scene=scene,
        default_camera=camera,
        knowledge=KnowledgeBase(recipe.knowledge),
        golden=golden,
    )


def recipe_from_dict(data: dict) -> SceneRecipe:
    shapes = tuple(
        ShapeSpec(
            kind=s["kind"],
            label=s.get("label", ""),
            palette_color=tuple(s["palette_color"]),
            count=int(s["count"]),
            center=tuple(s.get("center", (0.0, 0.0, 0.0))),
            size=float(s.get("size", 1.0)),
            minor_radius=float(s.get("minor_radius", 0.3)),
            component_id=s.get("component_id", ""),
        )
        for s in data["shapes"]
    )
    light = LightState(**data["light"]) if "light" in data else LightState()
    knowledge = tuple(
        KnowledgeEntry(e["title"], e["body"]) for e in data.get("knowledge", [])
    )
    return SceneRecipe(
        scene_id=data["scene_id"],
        shapes=shapes,
        seed=int(data.get("seed", 0)),
        background=tuple(data.get("background", (0.0, 0.0, 0.0))),
        light=light,
        knowledge=knowledge,
        frame_width=int(data.get("frame_width", 800)),
        frame_height=int(data.get("frame_height", 800)),
    )


__all__ = [
    "SHAPE_KINDS",
    "SceneRecipe",
    "ShapeSpec",
    "generate_synthetic_scene",
    "recipe_from_dict",
]
