"""HTTP/WebSocket gateway around the scene engine.

Endpoints::

    GET  /scenes                      list available scene bundles
    POST /sessions                    create a session for a scene
    GET  /sessions/{id}/state         current edit/camera/light state
    POST /sessions/{id}/commands      newline-delimited JSON commands
    POST /sessions/{id}/reset         the "Reset All" button
    GET  /sessions/{id}/log           full action log
    GET  /sessions/{id}/frame.png     current frame as PNG
    GET  /metrics                     TTFT latency snapshot
    WS   /sessions/{id}/ws            chat/commands in; token, frame,
                                      status, log, error events out
"""

from __future__ import annotations

import json

from fastapi import FastAPI, HTTPException, Request, Response, WebSocket, WebSocketDisconnect

from splatlab.errors import UnknownSceneError
from splatlab.service.config import ServiceConfig, load_config
from splatlab.service.frames import encode_session_frame, frame_event
from splatlab.service.schemas import (
    CommandResultModel,
    CommandsResponse,
    ComponentEditState,
    ComponentInfo,
    CreateSessionRequest,
    LightModel,
    LogEntryModel,
    LogResponse,
    MetricsSnapshot,
    SceneInfo,
    SessionInfo,
    SessionStateModel,
    SimilarityPair,
)
from splatlab.service.sessions import SessionHandle, SessionManager, log_entry_dict


def create_app(config: ServiceConfig | None = None, manager: SessionManager | None = None) -> FastAPI:
    config = config or ServiceConfig()
    manager = manager or SessionManager(config)
    app = FastAPI(title="splatlab gateway", version="0.1.0")
    app.state.manager = manager
    app.state.config = config

    def get_handle(session_id: str) -> SessionHandle:
        try:
            return manager.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")

    @app.get("/scenes", response_model=list[SceneInfo])
    def list_scenes():
        out = []
        for scene_id in manager.registry.list_ids():
            bundle = manager.registry.get(scene_id)
            components = []
            if bundle.scene is not None:
                for comp in bundle.scene.components:
                    components.append(
                        ComponentInfo(
                            id=comp.component_id,
                            label=comp.label,
                            palette_color=comp.palette_color,
                            primitive_count=len(comp.primitives),
                        )
                    )
            else:
                for cid, label in bundle.query_components:
                    components.append(ComponentInfo(id=cid, label=label))
            out.append(
                SceneInfo(
                    scene_id=scene_id,
                    kind=bundle.kind,
                    components=components,
                    has_embeddings=not bundle.needs_index(),
                    knowledge_entries=len(bundle.knowledge),
                )
            )
        return out

    @app.post("/sessions", response_model=SessionInfo, status_code=201)
    def create_session(request: CreateSessionRequest):
        try:
            handle = manager.create_session(request.scene_id)
        except UnknownSceneError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        session = handle.session
        return SessionInfo(
            session_id=session.id,
            scene_id=session.bundle.scene_id,
            width=session.camera.width,
            height=session.camera.height,
            frame_seq=0,
        )

    @app.get("/sessions/{session_id}/state", response_model=SessionStateModel)
    def session_state(session_id: str):
        session = get_handle(session_id).session
        components = []
        for comp in session.scene.components:
            edit = session.edits[comp.component_id]
            components.append(
                ComponentEditState(
                    id=comp.component_id,
                    label=comp.label,
                    palette_color=comp.palette_color,
                    visible=edit.visible,
                    opacity_scale=edit.opacity_scale,
                    color_override=edit.color_override,
                    light_gains=edit.light_gains,
                )
            )
        return SessionStateModel(
            session_id=session.id,
            scene_id=session.bundle.scene_id,
            components=components,
            light=LightModel(
                azimuth=session.light.azimuth,
                polar=session.light.polar,
                magnitude=session.light.magnitude,
                mode=session.light.mode.value,
            ),
            background=session.background,
            render_mode=session.render_mode.value,
            frame_seq=session._frame_seq,
        )

    @app.post("/sessions/{session_id}/commands", response_model=CommandsResponse)
    async def post_commands(session_id: str, request: Request):
        handle = get_handle(session_id)
        body = (await request.body()).decode("utf-8")
        payloads = [line for line in body.splitlines() if line.strip()]
        results = await handle.run_commands(payloads)
        return CommandsResponse(
            results=[
                CommandResultModel(
                    status=r.status, detail=r.detail, frame_dirty=r.frame_dirty, code=r.code
                )
                for r in results
            ]
        )

    @app.post("/sessions/{session_id}/reset", response_model=CommandResultModel)
    async def reset_all(session_id: str):
        result = await get_handle(session_id).reset_all()
        return CommandResultModel(
            status=result.status, detail=result.detail,
            frame_dirty=result.frame_dirty, code=result.code,
        )

    @app.get("/sessions/{session_id}/log", response_model=LogResponse)
    def get_log(session_id: str):
        session = get_handle(session_id).session
        entries = []
        for entry in session.action_log:
            data = log_entry_dict(entry)
            sims = data.pop("similarities")
            entries.append(
                LogEntryModel(
                    **data,
                    similarities=None
                    if sims is None
                    else [SimilarityPair(**pair) for pair in sims],
                )
            )
        return LogResponse(session_id=session.id, entries=entries)

    @app.get("/sessions/{session_id}/frame.png")
    def get_frame(session_id: str):
        handle = get_handle(session_id)
        return Response(content=encode_session_frame(handle.session), media_type="image/png")

    @app.get("/metrics", response_model=MetricsSnapshot)
    def metrics():
        return MetricsSnapshot(**manager.metrics.snapshot())

    @app.websocket("/sessions/{session_id}/ws")
    async def session_ws(websocket: WebSocket, session_id: str):
        try:
            handle = manager.get(session_id)
        except KeyError:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue = handle.subscribe()
        # the freshly subscribed client immediately sees the current frame
        queue.put_nowait(frame_event(handle.session))
        queue.put_nowait({"type": "status", "state": "idle"})

        import asyncio

        # single sender task: everything reaches the socket through the queue
        async def pump_events():
            while True:
                await websocket.send_json(await queue.get())

        pump = asyncio.create_task(pump_events())
        try:
            while True:
                raw = await websocket.receive_text()
                try:
                    message = json.loads(raw.splitlines()[0] if "\n" in raw.strip() else raw)
                except (json.JSONDecodeError, IndexError):
                    queue.put_nowait({"type": "error", "message": "invalid JSON"})
                    continue
                # bare command objects (newline-delimited) are accepted as-is,
                # next to the enveloped {"type": ...} messages
                if isinstance(message, dict) and "cmd" in message and "type" not in message:
                    payloads = [line for line in raw.splitlines() if line.strip()]
                    results = await handle.run_commands(payloads)
                    queue.put_nowait(
                        {
                            "type": "status",
                            "state": "idle",
                            "result": {
                                "status": results[0].status,
                                "detail": results[0].detail,
                                "code": results[0].code,
                            },
                            "results": [
                                {"status": r.status, "detail": r.detail, "code": r.code}
                                for r in results
                            ],
                        }
                    )
                    continue
                kind = message.get("type") if isinstance(message, dict) else None
                if kind == "chat":
                    outcome = await handle.run_chat(str(message.get("text", "")))
                    queue.put_nowait({"type": "status", "state": "idle", "outcome": outcome})
                elif kind == "command":
                    payload = json.dumps(message.get("payload", {}))
                    results = await handle.run_commands([payload])
                    queue.put_nowait(
                        {
                            "type": "status",
                            "state": "idle",
                            "result": {
                                "status": results[0].status,
                                "detail": results[0].detail,
                                "code": results[0].code,
                            },
                        }
                    )
                elif kind == "ping":
                    queue.put_nowait({"type": "status", "state": "idle"})
                else:
                    queue.put_nowait(
                        {"type": "error", "message": f"unknown message type {kind!r}"}
                    )
        except WebSocketDisconnect:
            pass
        finally:
            pump.cancel()
            handle.unsubscribe(queue)

    if config.studio_dir:
        from pathlib import Path

        from fastapi.staticfiles import StaticFiles

        studio = Path(config.studio_dir)
        if studio.is_dir():
            app.mount("/studio", StaticFiles(directory=studio, html=True), name="studio")

    return app


def main(config_path: str | None = None, host: str | None = None, port: int | None = None):
    import uvicorn

    config = load_config(config_path)
    app = create_app(config)
    uvicorn.run(app, host=host or config.host, port=port or config.port)


__all__ = ["create_app", "main"]
