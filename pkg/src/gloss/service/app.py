"""HTTP service exposing authoring, simulation, and analysis.

Thin layer: every handler loads snapshots from the document store, calls
the core package, and persists the results. Graph writes use optimistic
concurrency (the stored graph version is the CAS token, carried by the
``If-Match`` header on instructor saves); turns additionally serialize per
session through an in-process lock.

Error payloads are ``{"status", "code", "message", "detail"?}`` with code
one of: not_found, version_conflict, validation_failed, provider_error,
session_busy, bad_request, unauthorized, io_failure.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional

from fastapi import Depends, FastAPI, Header, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from gloss.analysis.reports import cohort_summary, overlay_dot, session_report
from gloss.authoring.dot import render_dot
from gloss.authoring.generate import expand_node, generate_graph
from gloss.authoring.jsonio import canonical_json, from_json, graph_from_dict, to_json
from gloss.authoring.templates import instantiate_template, list_templates
from gloss.errors import (
    EmptyGraphError,
    EmptyUtteranceError,
    GlossError,
    InvalidGraphError,
    InvalidThresholdError,
    IoFailureError,
    MalformedClassificationError,
    MalformedGenerationError,
    NotFoundError,
    ProviderError,
    SchemaViolationError,
    SessionBusyError,
    SessionCompletedError,
    UnknownIdError,
    UnknownTemplateError,
    VersionConflictError,
)
from gloss.graph.model import DialogueMode, NarrativeGraph, new_graph
from gloss.graph.validation import validate
from gloss.llm.config import ProviderConfig
from gloss.llm.providers import Provider, provider_from_config
from gloss.service.schemas import (
    ApiErrorBody,
    DiagnosticModel,
    ExpandRequest,
    GenerateRequest,
    GraphCreateRequest,
    GraphListResponse,
    GraphSummary,
    SessionCreateRequest,
    TemplateListResponse,
    TurnRequest,
    ValidateResponse,
)
from gloss.service.store import DocumentKind, DocumentStore
from gloss.session.engine import Session, end_session, start_session, submit_turn
from gloss.session.serialize import session_from_dict, session_to_dict, turn_to_dict

DEFAULT_DATA_DIR = "gloss-data"


class ApiException(GlossError):
    """Handler-level error with an explicit HTTP mapping."""

    def __init__(self, status: int, code: str, message: str, detail: Any = None) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.detail = detail


@dataclass
class ServiceSettings:
    data_dir: Path
    provider: Provider
    token: Optional[str] = None
    ui_dir: Optional[Path] = None

    @classmethod
    def from_env(cls) -> "ServiceSettings":
        ui_raw = os.environ.get("GLOSS_UI_DIR", "")
        return cls(
            data_dir=Path(os.environ.get("GLOSS_DATA_DIR", DEFAULT_DATA_DIR)),
            provider=provider_from_config(ProviderConfig.from_env()),
            token=os.environ.get("GLOSS_TOKEN") or None,
            ui_dir=Path(ui_raw) if ui_raw else None,
        )


class _SessionLocks:
    """Per-session in-process turn serialization."""

    def __init__(self) -> None:
        self._master = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def acquire(self, session_id: str) -> threading.Lock:
        with self._master:
            lock = self._locks.setdefault(session_id, threading.Lock())
        if not lock.acquire(blocking=False):
            raise SessionBusyError(f"session {session_id} already has a turn in flight")
        return lock


def _error_mapping(exc: GlossError) -> tuple[int, str, Any]:
    detail: Any = None
    if isinstance(exc, ApiException):
        return exc.status, exc.code, exc.detail
    if isinstance(exc, (NotFoundError, UnknownTemplateError, UnknownIdError)):
        return 404, "not_found", None
    if isinstance(exc, VersionConflictError):
        return 409, "version_conflict", {"expected": exc.expected, "actual": exc.actual}
    if isinstance(exc, SessionBusyError):
        return 409, "session_busy", None
    if isinstance(exc, SchemaViolationError):
        return 422, "validation_failed", {"path": exc.path}
    if isinstance(exc, InvalidGraphError):
        detail = [
            {"code": d.code, "severity": d.severity.value, "message": d.message, "subject": d.subject}
            for d in exc.diagnostics
        ]
        return 422, "validation_failed", detail
    if isinstance(exc, (EmptyGraphError, MalformedGenerationError)):
        return 422, "validation_failed", None
    if isinstance(exc, (InvalidThresholdError, EmptyUtteranceError, SessionCompletedError)):
        return 422, "bad_request", None
    if isinstance(exc, (ProviderError, MalformedClassificationError)):
        return 502, "provider_error", None
    if isinstance(exc, IoFailureError):
        return 500, "io_failure", None
    return 422, "bad_request", None


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    """Build the application; settings default to the environment."""
    settings = settings or ServiceSettings.from_env()
    store = DocumentStore(settings.data_dir)
    provider = settings.provider
    locks = _SessionLocks()

    app = FastAPI(title="gloss", version="0.1.0")
    app.state.store = store
    app.state.provider = provider
    app.state.settings = settings
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def check_auth(authorization: Optional[str] = Header(default=None)) -> None:
        if settings.token is None:
            return
        if authorization != f"Bearer {settings.token}":
            raise ApiException(401, "unauthorized", "missing or invalid bearer token")

    auth = Depends(check_auth)

    @app.exception_handler(GlossError)
    def handle_domain_error(request: Request, exc: GlossError) -> JSONResponse:
        status, code, detail = _error_mapping(exc)
        body = ApiErrorBody(status=status, code=code, message=str(exc), detail=detail)
        return JSONResponse(status_code=status, content=body.model_dump(exclude_none=True))

    @app.exception_handler(RequestValidationError)
    def handle_body_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        body = ApiErrorBody(
            status=422,
            code="bad_request",
            message="request body failed validation",
            detail=[
                {"loc": list(map(str, err.get("loc", ()))), "msg": str(err.get("msg", ""))}
                for err in exc.errors()
            ],
        )
        return JSONResponse(status_code=422, content=body.model_dump(exclude_none=True))

    def json_body(text: str, status_code: int = 200) -> Response:
        # Pass stored canonical bytes through untouched.
        return Response(content=text, media_type="application/json", status_code=status_code)

    def load_graph(graph_id: str) -> tuple[NarrativeGraph, int]:
        doc = store.get(DocumentKind.GRAPH, graph_id)
        return from_json(doc.body), doc.version

    def load_session(session_id: str) -> tuple[Session, int]:
        doc = store.get(DocumentKind.SESSION, session_id)
        return session_from_dict(json.loads(doc.body)), doc.version

    def save_graph(graph: NarrativeGraph, expected_version: int | None = None) -> str:
        body = to_json(graph)
        store.put(DocumentKind.GRAPH, graph.id, body, expected_version=expected_version)
        return body

    def save_session(session: Session, revision: int) -> str:
        body = canonical_json({**session_to_dict(session), "version": revision})
        store.put(DocumentKind.SESSION, session.id, body)
        return body

    # ------------------------------------------------------------------ graphs

    @app.post("/graphs", status_code=201, dependencies=[auth])
    def create_graph(body: GraphCreateRequest) -> Response:
        if body.graph is not None:
            graph = graph_from_dict(body.graph)
            try:
                store.get(DocumentKind.GRAPH, graph.id)
            except NotFoundError:
                pass
            else:
                raise ApiException(
                    409, "version_conflict", f"graph {graph.id!r} already exists"
                )
        else:
            if body.title is None or not body.title.strip():
                raise ApiException(422, "bad_request", "title must be non-empty")
            graph = new_graph(body.title, DialogueMode(body.mode))
        return json_body(save_graph(graph), status_code=201)

    @app.get("/graphs", dependencies=[auth])
    def list_graphs() -> GraphListResponse:
        summaries = []
        for graph_id in store.list_ids(DocumentKind.GRAPH):
            payload = json.loads(store.get(DocumentKind.GRAPH, graph_id).body)
            summaries.append(
                GraphSummary(
                    id=payload["id"],
                    title=payload["title"],
                    mode=payload["mode"],
                    version=payload["version"],
                    start_node=payload["start_node"],
                    node_count=len(payload["nodes"]),
                    edge_count=len(payload["edges"]),
                )
            )
        return GraphListResponse(graphs=summaries)

    @app.get("/graphs/{graph_id}", dependencies=[auth])
    def get_graph(graph_id: str) -> Response:
        return json_body(store.get(DocumentKind.GRAPH, graph_id).body)

    @app.put("/graphs/{graph_id}", dependencies=[auth])
    def put_graph(
        graph_id: str,
        payload: dict[str, Any],
        if_match: Optional[str] = Header(default=None, alias="If-Match"),
    ) -> Response:
        if if_match is None:
            raise ApiException(422, "bad_request", "If-Match header is required")
        try:
            expected = int(if_match.strip().strip('"'))
        except ValueError:
            raise ApiException(422, "bad_request", "If-Match must be an integer version") from None
        store.get(DocumentKind.GRAPH, graph_id)
        graph = graph_from_dict(payload)
        if graph.id != graph_id:
            raise ApiException(
                422, "bad_request", f"body id {graph.id!r} does not match path {graph_id!r}"
            )
        updated = replace(graph, version=expected + 1)
        return json_body(save_graph(updated, expected_version=expected))

    @app.delete("/graphs/{graph_id}", dependencies=[auth])
    def delete_graph(graph_id: str) -> dict[str, str]:
        store.delete(DocumentKind.GRAPH, graph_id)
        return {"deleted": graph_id}

    @app.post("/graphs/generate", status_code=201, dependencies=[auth])
    def generate(body: GenerateRequest) -> Response:
        if not body.prompt.strip():
            raise ApiException(422, "bad_request", "prompt must be non-empty")
        graph = generate_graph(provider, body.prompt)
        return json_body(save_graph(graph), status_code=201)

    @app.post("/graphs/{graph_id}/expand", dependencies=[auth])
    def expand(graph_id: str, body: ExpandRequest) -> Response:
        for attempt in (0, 1):
            graph, stored_version = load_graph(graph_id)
            expanded = expand_node(provider, graph, body.node_id, body.instruction)
            try:
                return json_body(save_graph(expanded, expected_version=stored_version))
            except VersionConflictError:
                if attempt:
                    raise
        raise AssertionError("unreachable")

    @app.get("/graphs/{graph_id}/validate", dependencies=[auth])
    def validate_graph(graph_id: str) -> ValidateResponse:
        graph, _ = load_graph(graph_id)
        return ValidateResponse(
            diagnostics=[
                DiagnosticModel(
                    code=d.code, severity=d.severity.value, message=d.message, subject=d.subject
                )
                for d in validate(graph)
            ]
        )

    @app.get("/graphs/{graph_id}/dot", dependencies=[auth])
    def graph_dot(graph_id: str, session: Optional[str] = None) -> Response:
        graph, _ = load_graph(graph_id)
        if session is None:
            text = render_dot(graph)
        else:
            loaded, _rev = load_session(session)
            if loaded.graph_id != graph_id:
                raise ApiException(
                    422,
                    "bad_request",
                    f"session {session!r} does not belong to graph {graph_id!r}",
                )
            text = overlay_dot(graph, loaded)
        return Response(content=text, media_type="text/vnd.graphviz")

    @app.get("/graphs/{graph_id}/cohort-summary", dependencies=[auth])
    def graph_cohort(graph_id: str) -> dict[str, Any]:
        graph, _ = load_graph(graph_id)
        sessions = []
        for session_id in store.list_ids(DocumentKind.SESSION):
            payload = json.loads(store.get(DocumentKind.SESSION, session_id).body)
            if payload.get("graph_id") == graph_id:
                sessions.append(session_from_dict(payload))
        return cohort_summary(graph, sessions).to_dict()

    # --------------------------------------------------------------- templates

    @app.get("/templates", dependencies=[auth])
    def templates() -> TemplateListResponse:
        return TemplateListResponse(templates=list(list_templates()))

    @app.post("/templates/{template_id}/instantiate", status_code=201, dependencies=[auth])
    def instantiate(template_id: str) -> Response:
        graph = instantiate_template(template_id)
        return json_body(save_graph(graph), status_code=201)

    # ---------------------------------------------------------------- sessions

    @app.post("/sessions", status_code=201, dependencies=[auth])
    def create_session(body: SessionCreateRequest) -> Response:
        graph, _ = load_graph(body.graph_id)
        threshold = 0.5 if body.threshold is None else body.threshold
        session = start_session(graph, threshold)
        session_body = save_session(session, revision=1)
        opening = graph.nodes[graph.start_node].avatar_utterance
        return json_body(
            canonical_json(
                {"session": json.loads(session_body), "opening_utterance": opening}
            ),
            status_code=201,
        )

    @app.get("/sessions/{session_id}", dependencies=[auth])
    def get_session(session_id: str) -> Response:
        return json_body(store.get(DocumentKind.SESSION, session_id).body)

    @app.post("/sessions/{session_id}/turns", dependencies=[auth])
    def post_turn(session_id: str, body: TurnRequest) -> Response:
        lock = locks.acquire(session_id)
        try:
            session, revision = load_session(session_id)
            outcome = None
            for attempt in (0, 1):
                graph, stored_version = load_graph(session.graph_id)
                try:
                    outcome = submit_turn(session, graph, provider, body.utterance)
                except (MalformedGenerationError, MalformedClassificationError) as exc:
                    raise ApiException(502, "provider_error", str(exc)) from exc
                if outcome.graph.version == graph.version:
                    break
                try:
                    save_graph(outcome.graph, expected_version=stored_version)
                    break
                except VersionConflictError:
                    # Another writer moved the graph; re-read and retry once.
                    if attempt:
                        raise
            assert outcome is not None
            save_session(outcome.session, revision=revision + 1)
            return json_body(
                canonical_json(
                    {
                        "turn": turn_to_dict(outcome.turn),
                        "session_status": outcome.session.status.value,
                        "graph_version": outcome.graph.version,
                    }
                )
            )
        finally:
            lock.release()

    @app.post("/sessions/{session_id}/end", dependencies=[auth])
    def finish_session(session_id: str) -> Response:
        lock = locks.acquire(session_id)
        try:
            session, revision = load_session(session_id)
            return json_body(save_session(end_session(session), revision=revision + 1))
        finally:
            lock.release()

    @app.get("/sessions/{session_id}/report", dependencies=[auth])
    def get_report(session_id: str) -> dict[str, Any]:
        session, _ = load_session(session_id)
        return session_report(session).to_dict()

    if settings.ui_dir is not None and settings.ui_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=settings.ui_dir, html=True), name="ui")

    return app
