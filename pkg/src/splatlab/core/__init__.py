from splatlab.core.ops import (
    compose_scenes,
    covariance_from_scale_rotation,
    covariances_from_scales_rotations,
    effective_params,
    effective_params_arrays,
    rotation_matrices,
)
from splatlab.core.types import (
    IDENTITY_EDIT,
    BasicScene,
    BoundingSphere,
    ComponentEdit,
    ComposedScene,
    GaussianPrimitive,
    LightMode,
    LightState,
    PackedSplats,
    edits_for,
    identity_edits,
    pack_primitives,
)

__all__ = [
    "BasicScene",
    "BoundingSphere",
    "ComponentEdit",
    "ComposedScene",
    "GaussianPrimitive",
    "IDENTITY_EDIT",
    "LightMode",
    "LightState",
    "PackedSplats",
    "compose_scenes",
    "covariance_from_scale_rotation",
    "covariances_from_scales_rotations",
    "edits_for",
    "effective_params",
    "effective_params_arrays",
    "identity_edits",
    "pack_primitives",
    "rotation_matrices",
]
