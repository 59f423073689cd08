"""HTTP + WebSocket control surface for live tuning sessions.

Endpoints
---------
- ``POST   /sessions``                  create from an experiment config (or ``{}``)
- ``GET    /sessions``                  list session ids
- ``GET    /sessions/{id}``             knob state and stream position
- ``PATCH  /sessions/{id}/canceller``   write knobs; 422 names the violated range
- ``POST   /sessions/{id}/tune``        search ATT/PS and apply the optimum
- ``POST   /sessions/{id}/digital-sic`` full budget run with current knobs
- ``DELETE /sessions/{id}``             tear down
- ``WS     /sessions/{id}/stream``      PSD frames, about ten per second

A built browser panel, when present next to the package source, is
served under ``/ui``.
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from starlette.concurrency import run_in_threadpool

from fdlab.experiment import ExperimentConfig, experiment_config_from_dict
from fdlab.session import Session, SessionManager

import anyio
import queue


def _frontend_dist() -> Path | None:
    d = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return d if d.is_dir() else None


def create_app(manager: SessionManager | None = None) -> FastAPI:
    manager = manager or SessionManager()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        manager.close_all()

    app = FastAPI(title="fdlab", version="0.1.0", lifespan=lifespan)
    app.state.manager = manager

    def _session(session_id: str) -> Session:
        try:
            return manager.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(config: dict = Body(default_factory=dict)):
        try:
            cfg = experiment_config_from_dict(config) if config else ExperimentConfig()
        except (ValueError, TypeError) as e:
            raise HTTPException(status_code=422, detail=str(e))
        sess = manager.create(cfg)
        return sess.state()

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": manager.ids()}

    @app.get("/sessions/{session_id}")
    def session_state(session_id: str):
        return _session(session_id).state()

    @app.patch("/sessions/{session_id}/canceller")
    def patch_canceller(session_id: str, body: dict = Body(...)):
        sess = _session(session_id)
        unknown = set(body) - {"att", "ps", "caps"}
        if unknown:
            raise HTTPException(status_code=422,
                                detail=f"unknown fields {sorted(unknown)}")
        try:
            return sess.set_canceller(att=body.get("att"), ps=body.get("ps"),
                                      caps=body.get("caps"))
        except (ValueError, TypeError) as e:
            raise HTTPException(status_code=422, detail=str(e))

    @app.post("/sessions/{session_id}/tune")
    def tune(session_id: str, body: dict = Body(default_factory=dict)):
        sess = _session(session_id)
        strategy = body.get("strategy", "exhaustive")
        try:
            return sess.tune(strategy=strategy)
        except ValueError as e:
            raise HTTPException(status_code=422, detail=str(e))

    @app.post("/sessions/{session_id}/digital-sic")
    def digital_sic(session_id: str):
        sess = _session(session_id)
        return sess.run_digital_sic()

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        try:
            manager.delete(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str):
        try:
            sess = manager.get(session_id)
        except KeyError:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        try:
            while True:
                try:
                    frame = await run_in_threadpool(sess.get_frame)
                except (queue.Empty, RuntimeError):
                    break
                await websocket.send_json(frame)
                await anyio.sleep(sess.frame_interval_s)
        except WebSocketDisconnect:
            pass

    dist = _frontend_dist()
    if dist is not None:
        app.mount("/ui", StaticFiles(directory=str(dist), html=True), name="ui")

    return app


def serve(host: str = "127.0.0.1", port: int = 8000) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)
