from __future__ import annotations

import math

import numpy as np
import pytest

from splatlab.core.types import (
    BasicScene,
    ComponentEdit,
    ComposedScene,
    GaussianPrimitive,
    LightMode,
    LightState,
)
from splatlab.io.synth import SceneRecipe, ShapeSpec, generate_synthetic_scene
from splatlab.knowledge import KnowledgeEntry
from splatlab.render.camera import Camera
from splatlab.semantic.providers import StubEmbeddingProvider


def random_primitive(rng: np.random.Generator, spread: float = 1.0) -> GaussianPrimitive:
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    n = rng.standard_normal(3)
    n /= np.linalg.norm(n)
    return GaussianPrimitive(
        mu=tuple(rng.uniform(-spread, spread, 3).tolist()),
        scale=tuple(np.exp(rng.uniform(math.log(0.05), math.log(0.6), 3)).tolist()),
        rotation=tuple(q.tolist()),
        opacity=float(rng.uniform(0.05, 1.0)),
        normal=tuple(n.tolist()),
        offset_color=tuple(rng.uniform(-0.3, 0.3, 3).tolist()),
        k_ambient=float(rng.uniform(0.0, 1.0)),
        k_diffuse=float(rng.uniform(0.0, 1.0)),
        k_specular=float(rng.uniform(0.0, 1.0)),
        shininess=float(rng.uniform(0.0, 64.0)),
    )


def random_component(
    rng: np.random.Generator, component_id: str, n_primitives: int, label: str = ""
) -> BasicScene:
    return BasicScene(
        component_id=component_id,
        label=label or component_id,
        palette_color=tuple(rng.uniform(0.0, 1.0, 3).tolist()),
        primitives=tuple(random_primitive(rng) for _ in range(n_primitives)),
    )


def random_scene(rng: np.random.Generator, max_gaussians: int = 20) -> ComposedScene:
    total = int(rng.integers(1, max_gaussians + 1))
    n_components = int(rng.integers(1, min(3, total) + 1))
    cuts = np.sort(rng.choice(np.arange(1, total), size=n_components - 1, replace=False)) if n_components > 1 else np.array([], dtype=int)
    sizes = np.diff(np.concatenate([[0], cuts, [total]]))
    components = tuple(
        random_component(rng, f"comp{i}", int(sizes[i])) for i in range(n_components)
    )
    if rng.uniform() < 0.5:
        light = LightState(mode=LightMode.HEADLIGHT, magnitude=float(rng.uniform(0.3, 2.0)))
    else:
        light = LightState(
            azimuth=float(rng.uniform(0, 2 * math.pi)),
            polar=float(rng.uniform(0, math.pi)),
            magnitude=float(rng.uniform(0.3, 2.0)),
            mode=LightMode.ORBITAL,
        )
    return ComposedScene(
        components=components,
        global_light=light,
        background=tuple(rng.uniform(0.0, 1.0, 3).tolist()),
    )


def random_camera(rng: np.random.Generator, width: int = 32, height: int = 32) -> Camera:
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    distance = float(rng.uniform(3.0, 6.0))
    up = (0.0, 1.0, 0.0) if abs(direction[1]) < 0.95 else (1.0, 0.0, 0.0)
    return Camera(
        position=tuple((direction * distance).tolist()),
        target=(0.0, 0.0, 0.0),
        up=up,
        fov_y=float(rng.uniform(0.5, 1.2)),
        width=width,
        height=height,
    )


def random_edits(rng: np.random.Generator, scene: ComposedScene) -> dict[str, ComponentEdit]:
    edits = {}
    for comp in scene.components:
        if rng.uniform() < 0.4:
            continue  # identity
        edits[comp.component_id] = ComponentEdit(
            color_override=tuple(rng.uniform(0, 1, 3).tolist()) if rng.uniform() < 0.4 else None,
            opacity_scale=float(rng.uniform(0.0, 2.0)),
            visible=bool(rng.uniform() < 0.9),
            light_gains=tuple(rng.uniform(0.0, 4.0, 4).tolist()),
        )
    return edits


TWO_SPHERE_RECIPE = SceneRecipe(
    scene_id="two-spheres",
    shapes=(
        ShapeSpec("sphere_shell", "red ball", (0.85, 0.1, 0.1), 260, center=(-1.2, 0.0, 0.0), size=0.8),
        ShapeSpec("sphere_shell", "blue ball", (0.1, 0.2, 0.9), 260, center=(1.2, 0.0, 0.0), size=0.8),
    ),
    seed=11,
    background=(0.02, 0.02, 0.03),
    knowledge=(
        KnowledgeEntry("red ball", "The red ball sits on the left side of the scene."),
        KnowledgeEntry("blue ball", "The blue ball sits on the right side of the scene."),
    ),
    frame_width=160,
    frame_height=160,
)

CARP_LIKE_RECIPE = SceneRecipe(
    scene_id="fishlike",
    shapes=(
        ShapeSpec("sphere_shell", "body", (0.55, 0.45, 0.3), 300, center=(0.0, 0.0, 0.0), size=1.0),
        ShapeSpec("sphere_shell", "pectoral fin", (0.7, 0.6, 0.4), 120, center=(-0.9, -0.6, 0.0), size=0.35),
        ShapeSpec("sphere_shell", "tail fin", (0.65, 0.55, 0.35), 120, center=(1.4, 0.0, 0.0), size=0.4),
        ShapeSpec("box", "dorsal fin", (0.6, 0.5, 0.35), 100, center=(0.0, 0.9, 0.0), size=0.3),
    ),
    seed=23,
    background=(0.05, 0.05, 0.08),
    knowledge=(
        KnowledgeEntry(
            "pectoral fin",
            "Paired fins located behind the head, used for steering and balance.",
        ),
        KnowledgeEntry("tail fin", "The caudal fin propels the fish forward."),
    ),
    frame_width=160,
    frame_height=160,
)


@pytest.fixture(scope="session")
def two_sphere_bundle():
    return generate_synthetic_scene(TWO_SPHERE_RECIPE)


@pytest.fixture(scope="session")
def carp_like_bundle():
    return generate_synthetic_scene(CARP_LIKE_RECIPE)


@pytest.fixture()
def stub_provider():
    return StubEmbeddingProvider(dimension=64)
