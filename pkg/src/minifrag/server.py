"""Local HTTP service: generation jobs, validation, reference rendering,
artifact CRUD, SSE progress, transcription proxy, and the static UI.

Every non-2xx response body has the single error shape
{"status": int, "code": str, "message": str}.  The server never runs a
shader that has not passed validation in-process.
"""

from __future__ import annotations

import json
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Request, UploadFile, File, Form
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response, StreamingResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .config import AppConfig
from .eval import Image, render_frame
from .jobs import JobRunner
from .lang import validate
from .llm import AuthError, LlmError, NetworkError, UnsupportedAudio, make_provider
from .store import ArtifactStore, NotFound, StoreCorrupt

MAX_SOURCE_BYTES = 256 * 1024
MAX_PENDING_JOBS = 32
MAX_IMAGE_DIM = 4096


class ApiException(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"status": status, "code": code, "message": message},
    )


def create_app(config: AppConfig) -> FastAPI:
    store = ArtifactStore(config.store_dir)
    provider = make_provider(config.provider)
    runner = JobRunner(
        provider,
        store,
        max_attempts=config.max_attempts,
        workers=config.workers,
        template_dir=config.template_dir,
    )

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        runner.shutdown()

    app = FastAPI(title="minifrag", lifespan=lifespan)
    app.state.store = store
    app.state.runner = runner

    @app.exception_handler(ApiException)
    async def api_exception_handler(request: Request, exc: ApiException):
        return _error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(request: Request, exc: StarletteHTTPException):
        code = {404: "not_found", 405: "method_not_allowed", 413: "payload_too_large"}.get(
            exc.status_code, "error"
        )
        return _error_response(exc.status_code, code, str(exc.detail))

    @app.exception_handler(RequestValidationError)
    async def validation_exception_handler(request: Request, exc: RequestValidationError):
        return _error_response(400, "invalid_request", str(exc.errors()[:1]))

    @app.exception_handler(StoreCorrupt)
    async def store_corrupt_handler(request: Request, exc: StoreCorrupt):
        return _error_response(500, "store_corrupt", str(exc))

    # -- generation jobs --

    @app.post("/api/generate", status_code=202)
    async def generate(request: Request):
        try:
            payload = await request.json()
        except ValueError:
            raise ApiException(400, "invalid_request", "body must be JSON")
        intent = payload.get("intent") if isinstance(payload, dict) else None
        if not isinstance(intent, str) or not intent.strip():
            raise ApiException(400, "blank_intent", "a non-blank intent is required")
        if runner.pending_count() >= MAX_PENDING_JOBS:
            raise ApiException(429, "backpressure",
                               f"more than {MAX_PENDING_JOBS} jobs pending")
        job = runner.submit(intent.strip())
        return {"job_id": job.id}

    def _get_job(job_id: str):
        job = runner.get(job_id)
        if job is None:
            raise ApiException(404, "not_found", f"no job {job_id!r}")
        return job

    @app.get("/api/jobs/{job_id}")
    async def job_snapshot(job_id: str):
        return _get_job(job_id).snapshot()

    @app.get("/api/jobs/{job_id}/events")
    async def job_events(job_id: str):
        job = _get_job(job_id)

        def stream():
            sub = job.subscribe()
            try:
                while True:
                    snap = sub.get()
                    yield f"event: status\ndata: {json.dumps(snap)}\n\n"
                    if snap["status"] in ("done", "failed"):
                        return
            finally:
                job.unsubscribe(sub)

        return StreamingResponse(stream(), media_type="text/event-stream")

    # -- artifact CRUD --

    @app.get("/api/shaders")
    async def list_shaders():
        return {
            "shaders": [
                {
                    "id": s.id,
                    "title": s.title,
                    "created_at": s.created_at.isoformat(),
                    "saved": s.saved,
                }
                for s in store.list()
            ]
        }

    def _load_artifact(shader_id: str):
        try:
            return store.load(shader_id)
        except NotFound:
            raise ApiException(404, "not_found", f"no shader {shader_id!r}")

    @app.get("/api/shaders/{shader_id}")
    async def get_shader(shader_id: str):
        artifact = _load_artifact(shader_id)
        return {**artifact.manifest(), "source": artifact.source}

    @app.post("/api/shaders/{shader_id}/save")
    async def save_shader(shader_id: str):
        _load_artifact(shader_id)
        artifact = store.set_saved(shader_id, True)
        return artifact.manifest()

    @app.delete("/api/shaders/{shader_id}")
    async def delete_shader(shader_id: str):
        _load_artifact(shader_id)
        store.delete(shader_id)
        return {"id": shader_id, "deleted": True}

    # -- validation and rendering --

    @app.post("/api/validate")
    async def validate_source(request: Request):
        body = await request.body()
        if len(body) > MAX_SOURCE_BYTES:
            raise ApiException(413, "payload_too_large",
                               f"source exceeds {MAX_SOURCE_BYTES} bytes")
        try:
            payload = json.loads(body)
        except ValueError:
            raise ApiException(400, "invalid_request", "body must be JSON")
        source = payload.get("source") if isinstance(payload, dict) else None
        if not isinstance(source, str):
            raise ApiException(400, "invalid_request", "a string 'source' is required")
        result = validate(source)
        return {"diagnostics": [d.to_dict() for d in result.diagnostics]}

    @app.post("/api/render")
    async def render(
        image: UploadFile = File(...),
        shader_id: str | None = Form(None),
        source: str | None = Form(None),
        time: float = Form(0.0),
    ):
        if (shader_id is None) == (source is None):
            raise ApiException(400, "invalid_request",
                               "provide exactly one of shader_id or source")
        if source is not None:
            if len(source.encode()) > MAX_SOURCE_BYTES:
                raise ApiException(413, "payload_too_large",
                                   f"source exceeds {MAX_SOURCE_BYTES} bytes")
            result = validate(source)
            if not result.ok:
                listing = "; ".join(str(d) for d in result.diagnostics)
                raise ApiException(422, "shader_invalid", listing)
            shader = result.shader
        else:
            artifact = _load_artifact(shader_id)
            shader = validate(artifact.source).shader

        blob = await image.read()
        try:
            frame = Image.from_png_bytes(blob)
        except Exception:
            raise ApiException(400, "invalid_png", "image is not a decodable PNG")
        if frame.width > MAX_IMAGE_DIM or frame.height > MAX_IMAGE_DIM:
            raise ApiException(413, "image_too_large",
                               f"image exceeds {MAX_IMAGE_DIM}x{MAX_IMAGE_DIM}")

        rendered = render_frame(shader, frame, time)
        return Response(content=rendered.to_png_bytes(), media_type="image/png")

    # -- transcription --

    @app.post("/api/transcribe")
    async def transcribe_audio(audio: UploadFile = File(...)):
        blob = await audio.read()
        if not blob:
            raise ApiException(400, "empty_audio", "audio payload is empty")
        session = provider.open_session()
        try:
            text = session.transcribe(blob)
        except UnsupportedAudio as err:
            raise ApiException(400, "unsupported_audio", str(err))
        except (NetworkError, AuthError) as err:
            raise ApiException(502, "upstream_error", str(err))
        except LlmError as err:
            raise ApiException(502, "upstream_error", str(err))
        return {"text": text}

    if config.static_dir is not None and Path(config.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
