"""HTTP service for review sessions; field names are documented in API.md."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .service import ApiError, ReviewService
from .store import SessionStore


class CreateSessionBody(BaseModel):
    dataset: str
    kind: str = "pretrain_rubric"
    n: int | str = "auto"
    seed: int = 0
    judges: list[str]


class JudgmentBody(BaseModel):
    sample_id: str
    judge_id: str
    expository: bool | None = None
    toxic: bool | None = None
    clean: bool | None = None
    hallucination: bool | None = None


def create_app(store: SessionStore, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="pintkit review service", docs_url=None, redoc_url=None)
    service = ReviewService(store)

    @app.exception_handler(ApiError)
    async def api_error_handler(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.http_status, content=exc.to_obj())

    @app.get("/healthz")
    def healthz():
        return {"ok": True}

    @app.get("/datasets")
    def datasets():
        return {"datasets": store.list_datasets()}

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        session, warnings, created = service.create_session(
            dataset=body.dataset, kind=body.kind, n=body.n, seed=body.seed, judges=body.judges
        )
        summary = service.session_summary(session.id)
        summary["warnings"] = warnings
        summary["created"] = created
        return summary

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": service.list_sessions()}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return service.session_summary(session_id)

    @app.get("/sessions/{session_id}/next")
    def next_sample(session_id: str, judge: str = Query(...)):
        return service.next_sample(session_id, judge)

    @app.post("/sessions/{session_id}/judgments")
    def submit_judgment(session_id: str, body: JudgmentBody):
        return service.submit_judgment(session_id, body.model_dump())

    @app.get("/sessions/{session_id}/report")
    def session_report(session_id: str):
        return service.session_report(session_id)

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app


def run_server(
    data_dir: str | Path,
    host: str = "127.0.0.1",
    port: int = 8551,
    ui_dir: str | Path | None = None,
) -> None:
    import uvicorn

    app = create_app(SessionStore(data_dir), ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
