"""HTTP service: dataset/label management plus steerable query sessions.

Progress streaming is plain server-sent events: one `progress` event per
batch, a final `terminal` event carrying the session's resting state,
then the stream closes.  Cancellation is a separate POST that flips the
session's cancel flag; the worker notices it between batches, so at most
one further event follows the acknowledgement.  Error bodies are always
JSON of the shape {code, message, details}.
"""
from __future__ import annotations

import dataclasses
import json
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from .aggregate import ProgressEvent, exact_answer, run_query
from .errors import EngineError, ParameterError
from .kb import KnowledgeBase, Relation, build_kb, relation_from_csv
from .membership import LinguisticLabel, load_label_catalog
from .query import ApproximateQuery, QuerySyntaxError, parse, rewrite, validate
from .sampling import new_sampler

DEFAULT_SAMPLE_PCT = 1.0
_KEEPALIVE_SECONDS = 15.0


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details=None):
        self.status = status
        self.code = code
        self.message = message
        self.details = details
        super().__init__(message)


@dataclass
class Dataset:
    id: str
    relation: Relation
    labels: list[LinguisticLabel] | None = None
    kb: KnowledgeBase | None = None


@dataclass
class QuerySession:
    id: str
    kb: KnowledgeBase
    relation: Relation
    labels: list[LinguisticLabel]
    aq: ApproximateQuery
    seed: int
    created_at: float = field(default_factory=time.time)
    state: str = "running"  # running -> done | cancelled | failed
    events: list[ProgressEvent] = field(default_factory=list)
    error: dict | None = None
    cancel: threading.Event = field(default_factory=threading.Event)
    cond: threading.Condition = field(default_factory=threading.Condition)

    @property
    def last_event(self) -> ProgressEvent | None:
        return self.events[-1] if self.events else None


class Registry:
    """Process-lifetime store of datasets and query sessions."""

    def __init__(self):
        self.datasets: dict[str, Dataset] = {}
        self.sessions: dict[str, QuerySession] = {}
        self.lock = threading.Lock()

    def dataset(self, dataset_id: str) -> Dataset:
        ds = self.datasets.get(dataset_id)
        if ds is None:
            raise ApiError(404, "unknown_dataset", f"no dataset {dataset_id!r}")
        return ds

    def session(self, query_id: str) -> QuerySession:
        s = self.sessions.get(query_id)
        if s is None:
            raise ApiError(404, "unknown_query", f"no query session {query_id!r}")
        return s


def _kb_summary(ds: Dataset) -> dict:
    kb = ds.kb
    return {
        "source": kb.source,
        "tau": kb.tau,
        "m": kb.m,
        "labels": [lab.key for lab in ds.labels],
        "ranges": {attr: list(r) for attr, r in sorted(kb.value_ranges.items())},
    }


def _session_worker(session: QuerySession) -> None:
    sampler = new_sampler(session.relation.ids, session.aq.sample_pct, session.seed)
    try:
        for ev in run_query(session.kb, session.aq, sampler, session.relation,
                            session.labels, cancel=session.cancel):
            with session.cond:
                session.events.append(ev)
                session.cond.notify_all()
        with session.cond:
            if session.state == "running":
                finished = session.events and session.events[-1].done
                session.state = "done" if finished or not session.cancel.is_set() else "cancelled"
            session.cond.notify_all()
    except Exception as exc:  # surfaced to clients as a terminal error event
        with session.cond:
            session.state = "failed"
            session.error = {
                "code": "execution_error",
                "message": str(exc),
                "details": {"type": type(exc).__name__},
            }
            session.cond.notify_all()


def _sse_stream(session: QuerySession):
    with session.cond:
        next_index = max(0, len(session.events) - 1)  # resume from latest event
    while True:
        with session.cond:
            if next_index >= len(session.events) and session.state == "running":
                session.cond.wait(timeout=_KEEPALIVE_SECONDS)
            pending = list(session.events[next_index:])
            next_index += len(pending)
            state = session.state
            finished = state != "running" and next_index >= len(session.events)
        for ev in pending:
            yield f"event: progress\nid: {ev.batch}\ndata: {json.dumps(ev.to_wire())}\n\n"
        if finished:
            terminal = {"state": state}
            if session.error is not None:
                terminal["error"] = session.error
            yield f"event: terminal\ndata: {json.dumps(terminal)}\n\n"
            return
        if not pending:
            yield ": keepalive\n\n"


def create_app(registry: Registry | None = None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="softagg", version="0.1.0")
    reg = registry if registry is not None else Registry()
    app.state.registry = reg
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.exception_handler(ApiError)
    async def _api_error(_request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    @app.exception_handler(RequestValidationError)
    async def _body_error(_request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"code": "bad_request", "message": "invalid request body",
                     "details": exc.errors()},
        )

    @app.post("/datasets", status_code=201)
    async def create_dataset(request: Request, table: str = "data",
                             id_column: str | None = None):
        body = (await request.body()).decode("utf-8")
        if not body.strip():
            raise ApiError(400, "empty_body", "dataset body is empty; expected CSV")
        try:
            relation = relation_from_csv(body, name=table, id_column=id_column)
        except EngineError as exc:
            raise ApiError(400, "bad_csv", str(exc)) from exc
        ds = Dataset(id=uuid.uuid4().hex[:8], relation=relation)
        with reg.lock:
            reg.datasets[ds.id] = ds
        return {"id": ds.id, "table": table, "rows": len(relation),
                "attributes": sorted(relation.columns)}

    @app.post("/datasets/{dataset_id}/labels")
    async def upload_labels(dataset_id: str, request: Request):
        ds = reg.dataset(dataset_id)
        body = (await request.body()).decode("utf-8")
        try:
            labels = load_label_catalog(body)
        except EngineError as exc:
            raise ApiError(422, "bad_catalog", str(exc)) from exc
        ds.labels = labels
        return {"labels": [lab.key for lab in labels], "count": len(labels)}

    @app.post("/datasets/{dataset_id}/kb")
    async def build_dataset_kb(dataset_id: str, body: dict):
        ds = reg.dataset(dataset_id)
        if ds.labels is None:
            raise ApiError(422, "no_labels", "upload a label catalog before building the KB")
        if "threshold" not in body:
            raise ApiError(422, "no_threshold", "body must carry a numeric 'threshold'")
        try:
            tau = float(body["threshold"])
        except (TypeError, ValueError) as exc:
            raise ApiError(422, "bad_threshold", f"threshold is not a number: {body['threshold']!r}") from exc
        try:
            kb = build_kb(ds.relation, ds.labels, tau)
        except EngineError as exc:
            raise ApiError(422, "kb_build_failed", str(exc)) from exc
        ds.kb = kb  # replaces atomically; running sessions keep their old KB
        return _kb_summary(ds)

    @app.get("/datasets/{dataset_id}/kb")
    async def kb_summary(dataset_id: str):
        ds = reg.dataset(dataset_id)
        if ds.kb is None:
            raise ApiError(404, "no_kb", "knowledge base not built yet")
        return _kb_summary(ds)

    @app.post("/queries/{query_id}/cancel")
    async def cancel_query(query_id: str):
        session = reg.session(query_id)
        with session.cond:
            if session.state == "running":
                if session.events and session.events[-1].done:
                    session.state = "done"
                else:
                    session.cancel.set()
                    session.state = "cancelled"
                session.cond.notify_all()
            return {"state": session.state}

    @app.post("/datasets/{dataset_id}/queries", status_code=202)
    async def start_query(dataset_id: str, body: dict):
        ds = reg.dataset(dataset_id)
        if ds.kb is None:
            raise ApiError(422, "no_kb", "build the knowledge base before querying")
        text = body.get("text")
        if not isinstance(text, str):
            raise ApiError(422, "no_text", "body must carry the query 'text'")
        try:
            q = parse(text)
        except QuerySyntaxError as exc:
            raise ApiError(422, "syntax_error", str(exc),
                           details={"position": exc.position}) from exc
        if body.get("confidence") is not None:
            try:
                q = dataclasses.replace(q, confidence=float(body["confidence"]))
            except (ParameterError, TypeError, ValueError) as exc:
                raise ApiError(422, "bad_confidence", str(exc)) from exc
        diags = validate(q, ds.kb, ds.labels, ds.relation)
        if diags:
            raise ApiError(422, "validation_error", "query failed validation",
                           details=[str(d) for d in diags])
        sample_pct = body.get("sample_pct", DEFAULT_SAMPLE_PCT)
        seed = body.get("seed")
        if seed is None:
            seed = uuid.uuid4().int & 0xFFFFFFFF
        try:
            aq = rewrite(q, float(sample_pct), ds.kb.value_ranges)
        except EngineError as exc:
            raise ApiError(422, "rewrite_failed", str(exc)) from exc
        session = QuerySession(
            id=uuid.uuid4().hex[:12], kb=ds.kb, relation=ds.relation,
            labels=list(ds.labels), aq=aq, seed=int(seed),
        )
        with reg.lock:
            reg.sessions[session.id] = session
        threading.Thread(target=_session_worker, args=(session,), daemon=True).start()
        return {"id": session.id, "seed": session.seed,
                "sample_pct": aq.sample_pct, "confidence": q.confidence}

    @app.get("/queries/{query_id}/events")
    async def query_events(query_id: str):
        session = reg.session(query_id)
        return StreamingResponse(
            _sse_stream(session),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache"},
        )

    @app.get("/queries/{query_id}/result")
    async def query_result(query_id: str, exact: bool = False):
        session = reg.session(query_id)
        with session.cond:
            last = session.last_event
            state = session.state
            error = session.error
        out = {
            "state": state,
            "event": last.to_wire() if last is not None else None,
        }
        if error is not None:
            out["error"] = error
        if exact:
            out["exact"] = exact_answer(session.kb, session.aq, session.relation,
                                        session.labels)
        return out

    return app
