"""HTTP gateway: the /v1 contract the portal consumes.

Bodies are structured text (JSON), except job submission which takes the
job description as raw text. Every error returns `{"error": {code,
message}}` with the code's canonical HTTP status; malformed requests map
to BadRequest rather than crashing the service.
"""

from __future__ import annotations

import json
import threading
import time as wall_time
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from ..errors import BadRequest, GridError
from ..simulation import Simulation
from .backend import LocalBackend


def _error_response(code: str, message: str, status: int) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def _parse_map_filter(raw: str) -> tuple[str, str]:
    if not raw or raw == "none":
        return "none", ""
    if ":" not in raw:
        raise BadRequest(f"map filter must look like kind:value, got {raw!r}")
    kind, _, value = raw.partition(":")
    return kind, value


class InteractiveClock(threading.Thread):
    """Wall-clock playback: advances virtual time by `scale` per real second."""

    def __init__(self, backend: LocalBackend, scale: float, tick: float = 0.2):
        super().__init__(daemon=True)
        self.backend = backend
        self.scale = scale
        self.tick = tick
        self._stop = threading.Event()

    def run(self):
        while not self._stop.is_set():
            wall_time.sleep(self.tick)
            self.backend.advance(self.tick * self.scale)

    def stop(self):
        self._stop.set()


def create_app(
    sim: Simulation,
    interactive_scale: float | None = None,
    portal_dir: str | Path | None = None,
) -> FastAPI:
    backend = LocalBackend(sim)
    app = FastAPI(title="grid gateway", docs_url=None, redoc_url=None)
    # the portal may be served from another origin (dev server, static host)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.backend = backend
    app.state.clock_thread = None

    if interactive_scale:
        app.state.clock_thread = InteractiveClock(backend, interactive_scale)
        app.state.clock_thread.start()

    @app.exception_handler(GridError)
    async def grid_error_handler(request: Request, exc: GridError):
        return _error_response(exc.code, exc.message, exc.http_status)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return _error_response("BadRequest", str(exc.errors()[:1]), 400)

    @app.exception_handler(StarletteHTTPException)
    async def route_error_handler(request: Request, exc: StarletteHTTPException):
        code = "NotFound" if exc.status_code == 404 else "BadRequest"
        return _error_response(code, str(exc.detail), exc.status_code)

    @app.exception_handler(Exception)
    async def fallback_handler(request: Request, exc: Exception):
        return _error_response("InternalError", f"{type(exc).__name__}: {exc}", 500)

    @app.post("/v1/jobs", status_code=201)
    async def submit_job(request: Request, user: str = "", rb: str = "", ce: str = ""):
        if not user:
            raise BadRequest("query parameter 'user' is required")
        jdl_text = (await request.body()).decode("utf-8", errors="replace")
        if not jdl_text.strip():
            raise BadRequest("request body must carry the job description text")
        return backend.submit(jdl_text, user, rb=rb, ce=ce)

    @app.get("/v1/jobs")
    def list_jobs(owner: str = "", state: str = ""):
        try:
            return {"jobs": backend.jobs(owner=owner, state=state)}
        except ValueError:
            raise BadRequest(f"unknown state {state!r}") from None

    @app.get("/v1/jobs/{job_id}")
    def get_job(job_id: str):
        return backend.job(job_id)

    @app.get("/v1/jobs/{job_id}/events")
    def get_events(job_id: str):
        return {"events": backend.events(job_id)}

    @app.get("/v1/jobs/{job_id}/output")
    def get_output(job_id: str):
        return backend.output(job_id)

    @app.delete("/v1/jobs/{job_id}")
    def cancel_job(job_id: str):
        return backend.cancel(job_id)

    @app.get("/v1/resources")
    def resources(request: Request, query: str = ""):
        schema_class = request.query_params.get("class", "edg")
        if schema_class not in ("edg", "glue"):
            raise BadRequest("class must be 'edg' or 'glue'")
        return {"resources": backend.resources(schema_class, query)}

    @app.get("/v1/replicas/{lfn:path}")
    def replicas(lfn: str):
        return backend.replicas(lfn)

    @app.post("/v1/replicas")
    async def replica_copy(request: Request):
        try:
            body = json.loads(await request.body())
            source = body["source"]
            return backend.replica_cp(
                source.get("kind", "ui"),
                source.get("location", ""),
                source["path"],
                body["dest_se"],
                body["lfn"],
            )
        except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
            raise BadRequest(f"malformed replica request: {exc}") from None

    @app.get("/v1/monitor/map")
    def monitor_map(filter: str = ""):
        kind, value = _parse_map_filter(filter)
        return Response(content=backend.monitor_map(kind, value), media_type="application/json")

    @app.get("/v1/vos")
    def vos():
        return {"vos": backend.vos()}

    @app.post("/v1/vos/{vo}/members", status_code=201)
    async def vo_add_member(vo: str, request: Request):
        try:
            body = json.loads(await request.body())
            subject = body["subject"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise BadRequest(f"malformed membership request: {exc}") from None
        return backend.vo_add_member(vo, subject, body.get("ca", ""), body.get("serial", 0))

    @app.get("/v1/gridmap/{site_id}")
    def gridmap(site_id: str):
        return PlainTextResponse(backend.gridmap(site_id))

    @app.get("/v1/brokers")
    def brokers():
        return {"brokers": backend.brokers()}

    @app.post("/v1/sim/advance")
    async def advance(request: Request):
        try:
            body = json.loads(await request.body())
            seconds = float(body["seconds"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise BadRequest(f"malformed advance request: {exc}") from None
        if seconds < 0:
            raise BadRequest("seconds must be non-negative")
        return backend.advance(seconds)

    @app.get("/v1/sim/time")
    def sim_time():
        return backend.now()

    @app.get("/v1/logs/lb")
    def lb_log():
        return PlainTextResponse(backend.lb_text())

    @app.get("/v1/logs/events")
    def event_log():
        return PlainTextResponse(backend.event_log_text())

    if portal_dir and Path(portal_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(portal_dir), html=True), name="portal")

    return app
