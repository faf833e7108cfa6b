"""Scene registry and per-session actors.

Each session is guarded by an asyncio lock: commands and chat acquire it in
arrival order, so all mutations are serialized per session while distinct
sessions proceed in parallel. Event subscribers (WebSocket connections)
receive {token, frame, status, log, error} dictionaries through per-
subscriber queues.
"""

from __future__ import annotations

import asyncio
import time
import uuid
from pathlib import Path

from splatlab.agents.runtime import run_vpa_loop
from splatlab.commands import CommandResult, Reset, execute_command, parse_command
from splatlab.errors import (
    CommandError,
    CommandFieldError,
    CommandSyntaxError,
    UnknownCommandError,
    UnknownSceneError,
)
from splatlab.io.bundle import SceneBundle, load_scene_bundle
from splatlab.service.config import (
    ServiceConfig,
    build_chat_provider,
    build_embedding_provider,
    build_stylizer,
)
from splatlab.service.frames import frame_event
from splatlab.service.metrics import LatencyRecord, MetricsStore
from splatlab.session import SessionState
from splatlab.agents.messages import user_message_count


class SceneRegistry:
    """Lazy directory-backed registry: every subdirectory of ``scenes_dir``
    holding a manifest.json is a scene."""

    def __init__(self, scenes_dir: str | Path):
        self.scenes_dir = Path(scenes_dir)
        self._cache: dict[str, SceneBundle] = {}

    def scan(self) -> dict[str, Path]:
        found = {}
        if self.scenes_dir.is_dir():
            for manifest in sorted(self.scenes_dir.glob("*/manifest.json")):
                import json

                scene_id = json.loads(manifest.read_text("utf-8")).get("scene_id")
                if scene_id:
                    found[scene_id] = manifest.parent
        return found

    def register(self, bundle: SceneBundle) -> None:
        self._cache[bundle.scene_id] = bundle

    def get(self, scene_id: str) -> SceneBundle:
        if scene_id in self._cache:
            return self._cache[scene_id]
        paths = self.scan()
        if scene_id not in paths:
            raise UnknownSceneError(f"unknown scene {scene_id!r}")
        bundle = load_scene_bundle(paths[scene_id])
        self._cache[scene_id] = bundle
        return bundle

    def list_ids(self) -> list[str]:
        ids = set(self._cache) | set(self.scan())
        return sorted(ids)


class SessionHandle:
    def __init__(self, session: SessionState, manager: "SessionManager"):
        self.session = session
        self.manager = manager
        self.lock = asyncio.Lock()
        self.subscribers: list[asyncio.Queue] = []
        self._pushed_log_seq = 0

    # -- event plumbing ------------------------------------------------------

    def subscribe(self) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue()
        self.subscribers.append(queue)
        return queue

    def unsubscribe(self, queue: asyncio.Queue) -> None:
        if queue in self.subscribers:
            self.subscribers.remove(queue)

    def broadcast(self, event: dict) -> None:
        for queue in list(self.subscribers):
            queue.put_nowait(event)

    def _broadcast_threadsafe(self, loop: asyncio.AbstractEventLoop, event: dict) -> None:
        loop.call_soon_threadsafe(self.broadcast, event)

    def push_new_log_entries(self) -> None:
        for entry in self.session.action_log:
            if entry.sequence > self._pushed_log_seq:
                self._pushed_log_seq = entry.sequence
                self.broadcast({"type": "log", "entry": log_entry_dict(entry)})

    def push_frame(self) -> None:
        self.broadcast(frame_event(self.session))

    # -- commands -------------------------------------------------------------

    def _execute_payload(self, payload: str) -> CommandResult:
        try:
            command = parse_command(payload)
        except CommandSyntaxError as exc:
            return CommandResult("rejected", str(exc), False, code="syntax-error")
        except UnknownCommandError as exc:
            return CommandResult("rejected", str(exc), False, code="unknown-command")
        except CommandFieldError as exc:
            return CommandResult("rejected", str(exc), False, code="field-error")
        except CommandError as exc:
            return CommandResult("rejected", str(exc), False, code="command-error")
        return execute_command(command, self.session)

    async def run_commands(self, payloads: list[str]) -> list[CommandResult]:
        async with self.lock:
            results = await asyncio.to_thread(
                lambda: [self._execute_payload(p) for p in payloads]
            )
            self.push_new_log_entries()
            if any(r.ok and r.frame_dirty for r in results):
                self.push_frame()
            return results

    async def reset_all(self) -> CommandResult:
        async with self.lock:
            result = await asyncio.to_thread(execute_command, Reset(target="all"), self.session)
            self.push_new_log_entries()
            if result.ok:
                self.push_frame()
            return result

    # -- chat -----------------------------------------------------------------

    async def run_chat(self, text: str) -> dict:
        """Run one utterance through the agent loop, streaming events to
        subscribers; records exactly one latency sample per request."""
        loop = asyncio.get_running_loop()
        async with self.lock:
            manager = self.manager
            started = time.perf_counter()
            first_token_ms: list[float] = []
            messages_at_request = user_message_count(self.session.agent_history) + 1

            def on_token(token: str) -> None:
                if not first_token_ms:
                    first_token_ms.append((time.perf_counter() - started) * 1000.0)
                self._broadcast_threadsafe(loop, {"type": "token", "text": token})

            def on_frame() -> None:
                self._broadcast_threadsafe(loop, frame_event(self.session))

            def on_status(state: str) -> None:
                self._broadcast_threadsafe(loop, {"type": "status", "state": state})

            outcome = await asyncio.to_thread(
                run_vpa_loop,
                self.session,
                text,
                manager.chat_provider,
                manager.embedding_provider,
                None,
                manager.config.max_iterations,
                manager.config.memory_cap,
                on_token,
                on_frame,
                on_status,
            )
            total_ms = (time.perf_counter() - started) * 1000.0
            ttft_ms = first_token_ms[0] if first_token_ms else total_ms
            manager.metrics.record(
                self.session.id,
                LatencyRecord(
                    request_id=uuid.uuid4().hex[:8],
                    ttft_ms=min(ttft_ms, total_ms),
                    total_ms=total_ms,
                    user_messages=messages_at_request,
                ),
            )
            self.push_new_log_entries()
            if outcome.error:
                self.broadcast({"type": "error", "message": outcome.error})
            return {
                "reply": outcome.reply,
                "iterations": outcome.iterations,
                "completed": outcome.completed,
                "aborted": outcome.aborted,
                "executed_commands": outcome.executed_commands,
            }


def log_entry_dict(entry) -> dict:
    data = {
        "sequence": entry.sequence,
        "timestamp": entry.timestamp,
        "kind": entry.kind,
        "payload": entry.payload,
        "detail": entry.detail,
        "tool_call_id": entry.tool_call_id,
    }
    if entry.similarities is not None:
        data["similarities"] = [
            {"component_id": cid, "similarity": sim} for cid, sim in entry.similarities
        ]
    else:
        data["similarities"] = None
    return data


class SessionManager:
    def __init__(self, config: ServiceConfig, registry: SceneRegistry | None = None):
        self.config = config
        self.registry = registry or SceneRegistry(config.scenes_dir)
        self.handles: dict[str, SessionHandle] = {}
        self.metrics = MetricsStore()
        self.chat_provider = build_chat_provider(config)
        self.embedding_provider = build_embedding_provider(config)
        self.stylizer = build_stylizer(config)

    def create_session(self, scene_id: str) -> SessionHandle:
        bundle = self.registry.get(scene_id)  # raises UnknownSceneError first
        session = SessionState(
            bundle,
            stylizer=self.stylizer,
            save_dir=self.config.save_dir,
            view_sample_count=self.config.view_sample_count,
            entropy_resolution=self.config.entropy_resolution,
        )
        handle = SessionHandle(session, self)
        self.handles[session.id] = handle
        return handle

    def get(self, session_id: str) -> SessionHandle:
        handle = self.handles.get(session_id)
        if handle is None:
            raise KeyError(session_id)
        return handle


__all__ = [
    "SceneRegistry",
    "SessionHandle",
    "SessionManager",
    "log_entry_dict",
]
