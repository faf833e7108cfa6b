"""Command-line interface: serve the gateway, manage bundles, and drive a
running gateway as a thin HTTP/WebSocket client."""

from __future__ import annotations

import asyncio
import json
import math
import sys
from pathlib import Path

import click

DEFAULT_BASE_URL = "http://127.0.0.1:8787"


@click.group()
def main():
    """Editable splat scenes: gateway server, bundle tools, and API client."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--scenes-dir", default=None, help="Override the scenes directory")
def serve(config_path, host, port, scenes_dir):
    """Run the gateway server."""
    from splatlab.service.app import create_app
    from splatlab.service.config import load_config

    config = load_config(config_path)
    if scenes_dir:
        config = config.model_copy(update={"scenes_dir": scenes_dir})
    import uvicorn

    uvicorn.run(create_app(config), host=host or config.host, port=port or config.port)


@main.group()
def bundle():
    """Scene bundle tools."""


@bundle.command()
@click.argument("recipe_file", type=click.Path(exists=True))
@click.argument("out_dir", type=click.Path())
@click.option("--seed", type=int, default=None, help="Override the recipe seed")
def synth(recipe_file, out_dir, seed):
    """Generate a synthetic scene bundle from a JSON recipe."""
    from dataclasses import replace

    from splatlab.io.bundle import save_scene_bundle
    from splatlab.io.synth import generate_synthetic_scene, recipe_from_dict

    recipe = recipe_from_dict(json.loads(Path(recipe_file).read_text("utf-8")))
    if seed is not None:
        recipe = replace(recipe, seed=seed)
    path = save_scene_bundle(generate_synthetic_scene(recipe), out_dir)
    click.echo(f"wrote bundle {recipe.scene_id!r} to {path}")


@bundle.command()
@click.argument("path", type=click.Path(exists=True))
def validate(path):
    """Load and fully validate a bundle; print a summary."""
    from splatlab.errors import BundleFormatError
    from splatlab.io.bundle import validate_bundle

    try:
        summary = validate_bundle(path)
    except BundleFormatError as exc:
        click.echo(f"INVALID: {exc}", err=True)
        sys.exit(1)
    for key, value in summary.items():
        click.echo(f"{key}: {value}")


@bundle.command()
@click.argument("path", type=click.Path(exists=True))
@click.option("--k", type=int, default=5, show_default=True,
              help="Top-k entropy views per component")
@click.option("--dimension", type=int, default=512, show_default=True)
@click.option("--views", type=int, default=92, show_default=True,
              help="Candidate cameras on the view sphere")
@click.option("--resolution", type=int, default=256, show_default=True)
@click.option("--endpoint", default=None,
              help="Remote embedding endpoint (default: deterministic stub)")
@click.option("--cache-dir", default=None)
def index(path, k, dimension, views, resolution, endpoint, cache_dir):
    """Build and persist per-component embeddings for a bundle."""
    from splatlab.io.bundle import load_scene_bundle, save_scene_bundle
    from splatlab.render.camera import DEFAULT_FOV_Y
    from splatlab.semantic.index import build_index
    from splatlab.semantic.providers import RemoteEmbeddingProvider, StubEmbeddingProvider
    from splatlab.views import sample_icosphere_cameras

    loaded = load_scene_bundle(path)
    if loaded.scene is None:
        click.echo("query-only bundles already carry their embeddings", err=True)
        sys.exit(1)
    if endpoint:
        provider = RemoteEmbeddingProvider(endpoint, dimension, cache_dir)
    else:
        provider = StubEmbeddingProvider(dimension)
    sphere = loaded.scene.bounding_sphere()
    cameras = sample_icosphere_cameras(
        views,
        sphere.center,
        max(sphere.radius, 1e-3) / math.sin(DEFAULT_FOV_Y / 2.0) * 1.4,
        width=resolution,
        height=resolution,
    )
    built = build_index(loaded.scene, cameras, provider, k=k)
    loaded.embeddings = {c.component_id: c for c in built.components}
    loaded.embedding_dimension = built.dimension
    save_scene_bundle(loaded, path)
    status = "partial" if built.partial else "complete"
    click.echo(f"indexed {len(built)} components ({status}, k={k}, dim={built.dimension})")
    for cid, reason in built.failures:
        click.echo(f"  failed {cid}: {reason}", err=True)


@main.group()
def client():
    """Thin client for a running gateway."""


def _base_url_option(f):
    return click.option("--base-url", default=DEFAULT_BASE_URL, show_default=True)(f)


@client.command()
@_base_url_option
def scenes(base_url):
    """List scenes on the gateway."""
    import httpx

    for scene in httpx.get(f"{base_url}/scenes").json():
        components = ", ".join(c["id"] for c in scene["components"])
        click.echo(f"{scene['scene_id']} [{scene['kind']}]: {components}")


@client.command()
@click.argument("scene_id")
@_base_url_option
def create(scene_id, base_url):
    """Create a session; prints its id."""
    import httpx

    response = httpx.post(f"{base_url}/sessions", json={"scene_id": scene_id})
    response.raise_for_status()
    click.echo(response.json()["session_id"])


@client.command()
@click.argument("session_id")
@click.argument("command_json", required=False)
@_base_url_option
def cmd(session_id, command_json, base_url):
    """Send one JSON command, or newline-delimited commands from stdin ('-')."""
    import httpx

    body = sys.stdin.read() if command_json in (None, "-") else command_json
    response = httpx.post(f"{base_url}/sessions/{session_id}/commands", content=body)
    response.raise_for_status()
    for result in response.json()["results"]:
        line = f"{result['status']}: {result['detail']}"
        if result.get("code"):
            line += f" [{result['code']}]"
        click.echo(line)


@client.command()
@click.argument("session_id")
@click.argument("text")
@_base_url_option
def chat(session_id, text, base_url):
    """Send a chat message; streams tokens and reports frame updates."""
    import websockets

    ws_url = base_url.replace("http://", "ws://").replace("https://", "wss://")

    async def run():
        async with websockets.connect(f"{ws_url}/sessions/{session_id}/ws") as ws:
            await ws.send(json.dumps({"type": "chat", "text": text}))
            while True:
                event = json.loads(await ws.recv())
                kind = event.get("type")
                if kind == "token":
                    click.echo(event["text"], nl=False)
                elif kind == "frame":
                    click.echo(f"\n[frame #{event['seq']}]", err=True)
                elif kind == "error":
                    click.echo(f"\nerror: {event['message']}", err=True)
                elif kind == "status" and event.get("state") == "idle" and "outcome" in event:
                    outcome = event["outcome"]
                    click.echo(
                        f"\n[{'done' if outcome['completed'] else 'incomplete'} "
                        f"after {outcome['iterations']} iteration(s), "
                        f"{len(outcome['executed_commands'])} command(s)]"
                    )
                    break

    asyncio.run(run())


@client.command()
@click.argument("session_id")
@_base_url_option
def log(session_id, base_url):
    """Print the session action log."""
    import httpx

    response = httpx.get(f"{base_url}/sessions/{session_id}/log")
    response.raise_for_status()
    for entry in response.json()["entries"]:
        click.echo(f"#{entry['sequence']:>4} {entry['kind']:<13} {entry['payload']}")
        if entry.get("similarities"):
            for pair in entry["similarities"]:
                click.echo(f"      {pair['component_id']}: {pair['similarity']:.4f}")


@client.command()
@click.argument("session_id")
@click.argument("out_path", type=click.Path())
@_base_url_option
def frame(session_id, out_path, base_url):
    """Download the current frame as PNG."""
    import httpx

    response = httpx.get(f"{base_url}/sessions/{session_id}/frame.png")
    response.raise_for_status()
    Path(out_path).write_bytes(response.content)
    click.echo(f"wrote {out_path}")


@client.command()
@_base_url_option
def metrics(base_url):
    """Print the latency metrics snapshot."""
    import httpx

    snap = httpx.get(f"{base_url}/metrics").json()
    click.echo(f"total requests: {snap['total_requests']}")
    for group in snap["groups"]:
        click.echo(
            f"  {group['user_messages']:>3} msg: ttft "
            f"{group['ttft_mean_ms']:.1f} ± {group['ttft_std_ms']:.1f} ms "
            f"({group['samples']} samples)"
        )


if __name__ == "__main__":
    main()
