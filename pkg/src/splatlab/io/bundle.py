"""Scene bundle persistence.

Directory layout::

    <bundle>/
      manifest.json            scene id, components, defaults, format version
      components/<id>.gsplat   little-endian float32 primitive records
      embeddings/<id>.vec      little-endian float32 object embedding
      knowledge.json           titled text entries
      golden.png               reference initial frame (optional)

A primitive record is 21 floats in fixed order: mu[3], scale[3],
rotation[4] (w, x, y, z), opacity, normal[3], offset_color[3], k_ambient,
k_diffuse, k_specular, shininess. Integrity is enforced on load: byte
counts, SHA-256 checksums, finiteness, and per-record validation; a bad
record fails the whole load with its file and byte offset.

Saves write to a temp file and atomically rename, so readers never observe
a half-written bundle.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from splatlab.core.types import (
    BasicScene,
    ComposedScene,
    GaussianPrimitive,
    LightMode,
    LightState,
)
from splatlab.errors import BundleFormatError
from splatlab.knowledge import KnowledgeBase, KnowledgeEntry
from splatlab.render.camera import Camera
from splatlab.render.image import ImageRGBA, decode_png, encode_png
from splatlab.semantic.index import SemanticComponent, SemanticIndex

FORMAT_VERSION = 1
RECORD_FIELDS = 21
RECORD_BYTES = RECORD_FIELDS * 4

KIND_FULL = "full"
KIND_QUERY_ONLY = "query_only"


@dataclass
class SceneBundle:
    """In-memory scene bundle; ``scene`` is None for query-only bundles."""

    scene_id: str
    scene: ComposedScene | None
    default_camera: Camera
    knowledge: KnowledgeBase = field(default_factory=KnowledgeBase)
    embeddings: dict[str, SemanticComponent] = field(default_factory=dict)
    embedding_dimension: int | None = None
    golden: ImageRGBA | None = None
    kind: str = KIND_FULL
    query_components: tuple[tuple[str, str], ...] = ()
    views: dict[str, list[Camera]] = field(default_factory=dict)
    path: Path | None = None

    def component_labels(self) -> dict[str, str]:
        if self.scene is not None:
            return {c.component_id: c.label for c in self.scene.components}
        return dict(self.query_components)

    def needs_index(self) -> bool:
        return set(self.embeddings) != set(self.component_labels())

    def semantic_index(self) -> SemanticIndex | None:
        if not self.embeddings or self.embedding_dimension is None:
            return None
        ordered = [self.embeddings[cid] for cid in sorted(self.embeddings)]
        return SemanticIndex(tuple(ordered), self.embedding_dimension)


def primitives_to_array(primitives) -> np.ndarray:
    arr = np.empty((len(primitives), RECORD_FIELDS), dtype=np.float32)
    for i, p in enumerate(primitives):
        arr[i] = (
            *p.mu, *p.scale, *p.rotation, p.opacity, *p.normal, *p.offset_color,
            p.k_ambient, p.k_diffuse, p.k_specular, p.shininess,
        )
    return arr


def array_to_primitives(arr: np.ndarray) -> tuple[GaussianPrimitive, ...]:
    prims = []
    for row in np.asarray(arr, dtype=np.float32):
        vals = [float(v) for v in row]
        prims.append(
            GaussianPrimitive(
                mu=tuple(vals[0:3]),
                scale=tuple(vals[3:6]),
                rotation=tuple(vals[6:10]),
                opacity=vals[10],
                normal=tuple(vals[11:14]),
                offset_color=tuple(vals[14:17]),
                k_ambient=vals[17],
                k_diffuse=vals[18],
                k_specular=vals[19],
                shininess=vals[20],
            )
        )
    return tuple(prims)


def camera_to_dict(camera: Camera) -> dict:
    return {
        "position": list(camera.position),
        "target": list(camera.target),
        "up": list(camera.up),
        "fov_y": camera.fov_y,
        "width": camera.width,
        "height": camera.height,
    }


def camera_from_dict(data: dict) -> Camera:
    return Camera(
        position=tuple(data["position"]),
        target=tuple(data["target"]),
        up=tuple(data["up"]),
        fov_y=float(data["fov_y"]),
        width=int(data["width"]),
        height=int(data["height"]),
    )


def light_to_dict(light: LightState) -> dict:
    return {
        "azimuth": light.azimuth,
        "polar": light.polar,
        "magnitude": light.magnitude,
        "mode": light.mode.value,
    }


def light_from_dict(data: dict) -> LightState:
    return LightState(
        azimuth=float(data["azimuth"]),
        polar=float(data["polar"]),
        magnitude=float(data["magnitude"]),
        mode=LightMode(data["mode"]),
    )


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _checksum(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def save_scene_bundle(bundle: SceneBundle, path: str | Path) -> Path:
    """Write the bundle directory; returns its path."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    components_meta = []
    if bundle.scene is not None:
        comp_dir = root / "components"
        comp_dir.mkdir(exist_ok=True)
        for comp in bundle.scene.components:
            data = primitives_to_array(comp.primitives).astype("<f4").tobytes()
            _write_atomic(comp_dir / f"{comp.component_id}.gsplat", data)
            components_meta.append(
                {
                    "id": comp.component_id,
                    "label": comp.label,
                    "palette_color": list(comp.palette_color),
                    "primitive_count": len(comp.primitives),
                    "checksum": _checksum(data),
                    "bounding_sphere": {
                        "center": list(comp.bounding_sphere.center),
                        "radius": comp.bounding_sphere.radius,
                    },
                }
            )
    else:
        for cid, label in bundle.query_components:
            components_meta.append({"id": cid, "label": label, "primitive_count": 0})

    if bundle.embeddings:
        emb_dir = root / "embeddings"
        emb_dir.mkdir(exist_ok=True)
        for meta in components_meta:
            semantic = bundle.embeddings.get(meta["id"])
            if semantic is None:
                continue
            vec = np.asarray(semantic.object_embedding, dtype="<f4").tobytes()
            _write_atomic(emb_dir / f"{meta['id']}.vec", vec)
            meta["embedding"] = {
                "file": f"embeddings/{meta['id']}.vec",
                "source": semantic.source,
            }

    for meta in components_meta:
        cid = meta["id"]
        if cid in bundle.views:
            meta["views"] = [camera_to_dict(c) for c in bundle.views[cid]]

    manifest = {
        "format_version": FORMAT_VERSION,
        "kind": bundle.kind,
        "scene_id": bundle.scene_id,
        "components": components_meta,
        "default_camera": camera_to_dict(bundle.default_camera),
        "embedding_dimension": bundle.embedding_dimension,
    }
    if bundle.scene is not None:
        manifest["background"] = list(bundle.scene.background)
        manifest["default_light"] = light_to_dict(bundle.scene.global_light)

    _write_atomic(
        root / "knowledge.json",
        json.dumps(
            {"entries": [{"title": e.title, "body": e.body} for e in bundle.knowledge.entries]},
            indent=2,
            sort_keys=True,
        ).encode("utf-8"),
    )
    if bundle.golden is not None:
        _write_atomic(root / "golden.png", encode_png(bundle.golden))
    _write_atomic(
        root / "manifest.json",
        json.dumps(manifest, indent=2, sort_keys=True).encode("utf-8"),
    )
    bundle.path = root
    return root


def _load_component(root: Path, meta: dict) -> BasicScene:
    cid = meta["id"]
    file = root / "components" / f"{cid}.gsplat"
    if not file.exists():
        raise BundleFormatError(f"{file}: missing primitive file for component {cid!r}")
    data = file.read_bytes()
    expected = meta["primitive_count"] * RECORD_BYTES
    if len(data) != expected:
        raise BundleFormatError(
            f"{file}: expected {expected} bytes for {meta['primitive_count']} records, "
            f"got {len(data)}"
        )
    if meta.get("checksum") and _checksum(data) != meta["checksum"]:
        raise BundleFormatError(f"{file}: checksum mismatch")
    arr = np.frombuffer(data, dtype="<f4").reshape(-1, RECORD_FIELDS)
    bad = ~np.isfinite(arr)
    if bad.any():
        record = int(np.argwhere(bad)[0][0])
        raise BundleFormatError(
            f"{file}: non-finite value in record {record} (byte offset {record * RECORD_BYTES})"
        )
    try:
        primitives = array_to_primitives(arr)
    except Exception as exc:
        raise BundleFormatError(f"{file}: invalid primitive record: {exc}") from exc
    return BasicScene(
        component_id=cid,
        label=meta.get("label", ""),
        palette_color=tuple(meta["palette_color"]),
        primitives=primitives,
    )


def load_scene_bundle(path: str | Path) -> SceneBundle:
    """Load and fully validate a bundle; raises :class:`BundleFormatError`
    on any inconsistency (no partial scenes)."""
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise BundleFormatError(f"{manifest_path}: not found")
    try:
        manifest = json.loads(manifest_path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise BundleFormatError(f"{manifest_path}: invalid JSON: {exc}") from exc
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise BundleFormatError(f"{manifest_path}: unsupported format version {version!r}")
    kind = manifest.get("kind", KIND_FULL)

    components_meta = manifest.get("components", [])
    ids = [meta["id"] for meta in components_meta]
    if len(set(ids)) != len(ids):
        raise BundleFormatError(f"{manifest_path}: duplicate component ids")

    scene = None
    query_components: tuple[tuple[str, str], ...] = ()
    if kind == KIND_FULL:
        comp_dir = root / "components"
        on_disk = {p.name for p in comp_dir.glob("*.gsplat")} if comp_dir.exists() else set()
        declared = {f"{cid}.gsplat" for cid in ids}
        orphans = on_disk - declared
        if orphans:
            raise BundleFormatError(
                f"{comp_dir}: primitive files not named in the manifest: {sorted(orphans)}"
            )
        components = [_load_component(root, meta) for meta in components_meta]
        light = light_from_dict(manifest["default_light"])
        scene = ComposedScene(
            components=tuple(components),
            global_light=light,
            background=tuple(manifest["background"]),
        )
    elif kind == KIND_QUERY_ONLY:
        query_components = tuple((meta["id"], meta.get("label", "")) for meta in components_meta)
    else:
        raise BundleFormatError(f"{manifest_path}: unknown bundle kind {kind!r}")

    dimension = manifest.get("embedding_dimension")
    embeddings: dict[str, SemanticComponent] = {}
    for meta in components_meta:
        emb_meta = meta.get("embedding")
        if not emb_meta:
            continue
        vec_path = root / emb_meta["file"]
        if not vec_path.exists():
            raise BundleFormatError(f"{vec_path}: missing embedding file")
        vec = np.frombuffer(vec_path.read_bytes(), dtype="<f4").astype(np.float64)
        if dimension is not None and len(vec) != dimension:
            raise BundleFormatError(
                f"{vec_path}: embedding has dimension {len(vec)}, manifest says {dimension}"
            )
        embeddings[meta["id"]] = SemanticComponent(
            component_id=meta["id"],
            label=meta.get("label", ""),
            object_embedding=vec,
            source=emb_meta.get("source", "vision_only"),
        )

    views = {
        meta["id"]: [camera_from_dict(v) for v in meta["views"]]
        for meta in components_meta
        if meta.get("views")
    }

    knowledge = KnowledgeBase()
    knowledge_path = root / "knowledge.json"
    if knowledge_path.exists():
        entries = json.loads(knowledge_path.read_text("utf-8")).get("entries", [])
        knowledge = KnowledgeBase(
            tuple(KnowledgeEntry(e["title"], e["body"]) for e in entries)
        )

    golden = None
    golden_path = root / "golden.png"
    if golden_path.exists():
        golden = decode_png(golden_path.read_bytes())

    return SceneBundle(
        scene_id=manifest["scene_id"],
        scene=scene,
        default_camera=camera_from_dict(manifest["default_camera"]),
        knowledge=knowledge,
        embeddings=embeddings,
        embedding_dimension=dimension,
        golden=golden,
        kind=kind,
        query_components=query_components,
        views=views,
        path=root,
    )


def validate_bundle(path: str | Path) -> dict:
    """Load the bundle and report a summary (raises on any defect)."""
    bundle = load_scene_bundle(path)
    labels = bundle.component_labels()
    return {
        "scene_id": bundle.scene_id,
        "kind": bundle.kind,
        "components": len(labels),
        "primitives": len(bundle.scene) if bundle.scene is not None else 0,
        "embedded_components": len(bundle.embeddings),
        "knowledge_entries": len(bundle.knowledge),
        "has_golden": bundle.golden is not None,
    }


__all__ = [
    "FORMAT_VERSION",
    "KIND_FULL",
    "KIND_QUERY_ONLY",
    "RECORD_BYTES",
    "RECORD_FIELDS",
    "SceneBundle",
    "array_to_primitives",
    "camera_from_dict",
    "camera_to_dict",
    "light_from_dict",
    "light_to_dict",
    "load_scene_bundle",
    "primitives_to_array",
    "save_scene_bundle",
    "validate_bundle",
]
