from splatlab.io.bundle import (
    SceneBundle,
    load_scene_bundle,
    save_scene_bundle,
    validate_bundle,
)
from splatlab.io.ingest import ingest_multiview, rank_frames_by_entropy
from splatlab.io.png import load_image, save_image
from splatlab.io.synth import SceneRecipe, ShapeSpec, generate_synthetic_scene, recipe_from_dict

__all__ = [
    "SceneBundle",
    "SceneRecipe",
    "ShapeSpec",
    "generate_synthetic_scene",
    "ingest_multiview",
    "load_image",
    "load_scene_bundle",
    "rank_frames_by_entropy",
    "recipe_from_dict",
    "save_image",
    "save_scene_bundle",
    "validate_bundle",
]
