"""Loopback HTTP/WS service exposing sessions, triggers, and memory.

Single-process, single-user: no auth, no TLS, meant to sit behind localhost
for a console or UI client. REST carries actions; the per-session WebSocket
stream mirrors transcript events, trigger lifecycle, and answers so a client
can render live state without polling.
"""

from __future__ import annotations

import uuid

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .config import EngineConfig, make_backend, make_embedder, make_store
from .errors import (
    EmptyContextError,
    EmptyQueryError,
    EmptyTextError,
    ModeArgMismatchError,
    PromptTooLargeError,
    RecallError,
    RemoteUnavailableError,
    SessionClosedError,
)
from .ingest import TranscriptEvent
from .session import InteractionLog, RealClock, Session


class CreateSessionRequest(BaseModel):
    session_id: str | None = None


class EventRequest(BaseModel):
    text: str
    timestamp_ms: int | None = None
    speaker: str | None = None
    encode: bool = True


class TriggerRequest(BaseModel):
    mode: str
    voiced_query: str | None = None
    query_time_ms: int | None = None


class PrimeRequest(BaseModel):
    text: str


def _status_for(exc: Exception) -> int:
    if isinstance(exc, SessionClosedError):
        return 409
    if isinstance(exc, RemoteUnavailableError):
        return 503
    if isinstance(exc, PromptTooLargeError):
        return 413
    if isinstance(
        exc,
        (ModeArgMismatchError, EmptyTextError, EmptyQueryError, EmptyContextError, ValueError),
    ):
        return 422
    return 500


class ServiceState:
    """Process-wide engine state: one store, many sessions, WS subscribers."""

    def __init__(self, cfg: EngineConfig):
        self.cfg = cfg
        self.store = make_store(cfg)
        self.embedder = make_embedder(cfg)
        self.backend = make_backend(cfg)
        self.clock = RealClock()
        self.sessions: dict[str, Session] = {}
        self.subscribers: dict[str, list[WebSocket]] = {}

    def create_session(self, session_id: str | None) -> Session:
        sid = session_id or uuid.uuid4().hex[:12]
        if sid in self.sessions:
            raise HTTPException(status_code=409, detail=f"session already exists: {sid}")
        log = InteractionLog(self.cfg.log_path) if self.cfg.log_path else None
        session = Session(
            sid,
            store=self.store,
            embedder=self.embedder,
            backend=self.backend,
            capacity_chars=self.cfg.capacity_chars,
            flush_threshold_chars=self.cfg.flush_threshold_chars,
            retrieval=self.cfg.retrieval,
            clock=self.clock,
            log=log,
        )
        self.sessions[sid] = session
        return session

    def get_session(self, sid: str) -> Session:
        session = self.sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no such session: {sid}")
        return session

    async def broadcast(self, sid: str, message: dict) -> None:
        stale: list[WebSocket] = []
        for ws in self.subscribers.get(sid, []):
            try:
                await ws.send_json(message)
            except Exception:
                stale.append(ws)
        for ws in stale:
            self.unsubscribe(sid, ws)

    def subscribe(self, sid: str, ws: WebSocket) -> None:
        self.subscribers.setdefault(sid, []).append(ws)

    def unsubscribe(self, sid: str, ws: WebSocket) -> None:
        subs = self.subscribers.get(sid, [])
        if ws in subs:
            subs.remove(ws)


def _context_payload(session: Session) -> dict:
    content = session.buffer.snapshot()
    return {
        "content": content,
        "chars": len(content),
        "capacity_chars": session.buffer.capacity_chars,
    }


def create_app(cfg: EngineConfig | None = None) -> FastAPI:
    state = ServiceState(cfg or EngineConfig())
    app = FastAPI(title="recallkit", version="0.1.0")
    app.state.engine = state
    # Browser consoles load from a separate static origin; the service is
    # localhost single-user with no credentials, so any origin may call it.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.get("/healthz")
    async def healthz() -> dict:
        return {
            "status": "ok",
            "blocks": len(state.store),
            "sessions": len(state.sessions),
            "text_backend": state.cfg.text_backend,
        }

    @app.post("/sessions", status_code=201)
    async def create_session(req: CreateSessionRequest) -> dict:
        session = state.create_session(req.session_id)
        return {
            "session_id": session.session_id,
            "capacity_chars": session.buffer.capacity_chars,
            "flush_threshold_chars": session.stager.flush_threshold_chars,
        }

    @app.get("/sessions")
    async def list_sessions() -> dict:
        return {
            "sessions": [
                {
                    "session_id": s.session_id,
                    "closed": s.closed,
                    "interactions": len(s.list_interactions()),
                }
                for s in state.sessions.values()
            ]
        }

    @app.post("/sessions/{sid}/events")
    async def post_event(sid: str, req: EventRequest) -> dict:
        session = state.get_session(sid)
        stamp = req.timestamp_ms if req.timestamp_ms is not None else state.clock.now_ms()
        try:
            event = TranscriptEvent(text=req.text, timestamp_ms=stamp, speaker=req.speaker)
            blocks = session.ingest(event, encode=req.encode)
        except (RecallError, ValueError) as exc:
            raise HTTPException(status_code=_status_for(exc), detail=str(exc)) from exc
        payload = {
            "type": "event",
            "session_id": sid,
            "text": event.text,
            "timestamp_ms": event.timestamp_ms,
            "speaker": event.speaker,
            "encoded_block_ids": [b.id for b in blocks],
            "context": _context_payload(session),
        }
        await state.broadcast(sid, payload)
        return {
            "encoded_block_ids": [b.id for b in blocks],
            "context": _context_payload(session),
        }

    @app.post("/sessions/{sid}/prime")
    async def prime(sid: str, req: PrimeRequest) -> dict:
        session = state.get_session(sid)
        try:
            session.prime_context(req.text)
        except (RecallError, ValueError) as exc:
            raise HTTPException(status_code=_status_for(exc), detail=str(exc)) from exc
        payload = {"type": "context", "session_id": sid, "context": _context_payload(session)}
        await state.broadcast(sid, payload)
        return {"context": _context_payload(session)}

    @app.post("/sessions/{sid}/trigger")
    async def trigger(sid: str, req: TriggerRequest) -> dict:
        session = state.get_session(sid)
        await state.broadcast(
            sid,
            {
                "type": "trigger_started",
                "session_id": sid,
                "mode": req.mode,
                "voiced_query": req.voiced_query,
            },
        )
        try:
            record = session.trigger(
                req.mode, req.voiced_query, query_time_ms=req.query_time_ms
            )
        except (RecallError, ValueError) as exc:
            await state.broadcast(
                sid,
                {
                    "type": "trigger_failed",
                    "session_id": sid,
                    "mode": req.mode,
                    "error": type(exc).__name__,
                    "detail": str(exc),
                },
            )
            raise HTTPException(status_code=_status_for(exc), detail=str(exc)) from exc
        await state.broadcast(sid, {"type": "answer", "session_id": sid, "record": record.to_dict()})
        return record.to_dict()

    @app.post("/sessions/{sid}/close")
    async def close_session(sid: str) -> dict:
        session = state.get_session(sid)
        blocks = session.close()
        payload = {
            "type": "session_closed",
            "session_id": sid,
            "encoded_block_ids": [b.id for b in blocks],
        }
        await state.broadcast(sid, payload)
        return {"encoded_block_ids": [b.id for b in blocks], "closed": True}

    @app.get("/sessions/{sid}/context")
    async def get_context(sid: str) -> dict:
        session = state.get_session(sid)
        return {"context": _context_payload(session), "closed": session.closed}

    @app.get("/sessions/{sid}/interactions")
    async def interactions(sid: str, mode: str | None = None) -> dict:
        session = state.get_session(sid)
        if mode is not None and mode not in ("baseline", "query", "queryless"):
            raise HTTPException(status_code=422, detail=f"unknown mode: {mode}")
        return {"interactions": [r.to_dict() for r in session.list_interactions(mode)]}

    @app.get("/sessions/{sid}/memory")
    async def memory(sid: str) -> dict:
        session = state.get_session(sid)
        return {
            "blocks": [
                {
                    "id": b.id,
                    "text": b.text,
                    "start_timestamp": b.start_timestamp,
                    "session_id": b.session_id,
                }
                for b in state.store.blocks()
            ],
            "last_hit_similarities": session.last_hit_similarities(),
        }

    @app.websocket("/sessions/{sid}/stream")
    async def stream(ws: WebSocket, sid: str) -> None:
        if sid not in state.sessions:
            await ws.close(code=4004)
            return
        await ws.accept()
        state.subscribe(sid, ws)
        session = state.sessions[sid]
        await ws.send_json(
            {
                "type": "hello",
                "session_id": sid,
                "context": _context_payload(session),
                "closed": session.closed,
            }
        )
        try:
            while True:
                # Incoming frames are ignored; the stream is server-push only.
                await ws.receive_text()
        except WebSocketDisconnect:
            pass
        finally:
            state.unsubscribe(sid, ws)

    return app


app = create_app()
