from splatlab.render.camera import Camera, camera_spherical, orbit_camera
from splatlab.render.image import ImageRGBA, decode_png, encode_png
from splatlab.render.rasterizer import (
    FlatComponent,
    RenderMode,
    RenderOptions,
    RenderStats,
    Splat2D,
    composite_pixel,
    flatten_component,
    flatten_scene,
    project_gaussian,
    render,
    render_components,
    render_with_stats,
    shade_colors,
    shade_primitive,
)

__all__ = [
    "Camera",
    "FlatComponent",
    "ImageRGBA",
    "RenderMode",
    "RenderOptions",
    "RenderStats",
    "Splat2D",
    "camera_spherical",
    "composite_pixel",
    "decode_png",
    "encode_png",
    "flatten_component",
    "flatten_scene",
    "orbit_camera",
    "project_gaussian",
    "render",
    "render_components",
    "render_with_stats",
    "shade_colors",
    "shade_primitive",
]
