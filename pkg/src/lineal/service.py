"""HTTP facade: evaluate programs into in-memory sessions, answer queries.

Selections travel as raw address lists once a session exists; the client
keeps the path maps it got at creation time.  Sessions are immutable, so
queries are pure reads and safe under concurrent requests; the store
itself takes a lock for insert/evict (least recently used beyond the cap).
"""

from __future__ import annotations

import threading
import uuid
from collections import OrderedDict
from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .core import LinealError
from .datasets import parse_csv
from .desugar import DesugarError
from .queries import QUERY_OPS, QueryError, run_query
from .session import Session, SessionError, run
from .surface import ParseError


class SessionStore:
    """Keeps the most recently used sessions up to a fixed cap."""

    def __init__(self, cap: int):
        if cap < 1:
            raise ValueError("session cap must be positive")
        self.cap = cap
        self._lock = threading.Lock()
        self._sessions: OrderedDict[str, Session] = OrderedDict()

    def put(self, session: Session) -> str:
        sid = uuid.uuid4().hex[:12]
        with self._lock:
            self._sessions[sid] = session
            while len(self._sessions) > self.cap:
                self._sessions.popitem(last=False)
        return sid

    def get(self, sid: str) -> Optional[Session]:
        with self._lock:
            session = self._sessions.get(sid)
            if session is not None:
                self._sessions.move_to_end(sid)
            return session

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)


class CreateBody(BaseModel):
    source: str
    datasets: dict[str, Any] = {}


class QueryBody(BaseModel):
    op: str
    selection: list[int]
    restrict: str = "none"


def _error_detail(err: Exception) -> dict:
    if isinstance(err, ParseError):
        return {"message": err.message, "line": err.line, "col": err.col}
    if isinstance(err, DesugarError) and err.diagnostics:
        first = err.diagnostics[0]
        return {"message": first.message, "line": first.line, "col": first.col}
    return {"message": str(err), "line": None, "col": None}


def create_app(session_cap: int = 32) -> FastAPI:
    app = FastAPI(title="lineal sessions")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(session_cap)
    app.state.store = store

    @app.post("/sessions")
    def create_session(body: CreateBody) -> dict:
        datasets = {}
        try:
            for name, value in body.datasets.items():
                datasets[name] = parse_csv(value) if isinstance(value, str) else value
            session = run(body.source, datasets)
        except LinealError as err:
            raise HTTPException(status_code=400, detail=_error_detail(err)) from None
        sid = store.put(session)
        return {
            "id": sid,
            "view": session.view,
            "inputs": [
                {"path": e.path, "addr": e.addr, "kind": e.kind}
                for e in session.input_entries
            ],
        }

    def _session_or_404(sid: str) -> Session:
        session = store.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail={"message": f"no session {sid}"})
        return session

    @app.post("/sessions/{sid}/query")
    def query_session(sid: str, body: QueryBody) -> dict:
        session = _session_or_404(sid)
        if body.op not in QUERY_OPS:
            raise HTTPException(
                status_code=422,
                detail={"message": f"unknown op {body.op!r}", "ops": sorted(QUERY_OPS)},
            )
        try:
            answer = run_query(session.graph, body.op, frozenset(body.selection))
            answer = session.restrict(answer, body.restrict)
        except (QueryError, SessionError, LinealError) as err:
            raise HTTPException(status_code=422, detail={"message": str(err)}) from None
        return {"selection": sorted(answer)}

    @app.get("/sessions/{sid}/graph")
    def session_graph(sid: str) -> dict:
        session = _session_or_404(sid)
        return {
            "vertices": sorted(session.graph.vertices),
            "edges": sorted(session.graph.edges()),
            "labels": {str(a): label for a, label in sorted(session.labels.items())},
        }

    return app


def serve(host: str = "127.0.0.1", port: int = 8000, session_cap: int = 32) -> None:
    import uvicorn

    uvicorn.run(create_app(session_cap), host=host, port=port)
