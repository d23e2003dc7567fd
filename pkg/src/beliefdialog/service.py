"""Session service: HTTP API over the dialog engine plus durable sessions.

Persistence is an append-only JSONL journal of create/message events.
Because a turn is deterministic given the engine and prior state,
replaying the journal at startup reconstructs every session exactly
(recorded timestamps are reused, so snapshots match bit for bit).
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from collections import defaultdict
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .dialog import AdvisorReply, DialogEngine, DialogSession
from .errors import BeliefDialogError, InputError


def reply_payload(session: DialogSession, reply: AdvisorReply) -> dict:
    return {
        "session_id": session.id,
        "reply": reply.text,
        "belief": {
            "labels": list(reply.belief.labels),
            "probs": list(reply.belief.probs),
            "label": reply.belief.top_label,
        },
        "fired_rules": list(reply.fired_rules),
        "skipped_states": list(reply.skipped_states),
        "asked_state": reply.asked_state,
        "slots": dict(reply.slots),
        "status": reply.status,
        "warnings": list(reply.warnings),
        "turn_index": reply.turn_index,
    }


def session_snapshot(session: DialogSession) -> dict:
    return {
        "session_id": session.id,
        "status": session.status,
        "weights": dict(sorted(session.weights.items())),
        "slots": dict(sorted(session.slots.items())),
        "turn_count": session.turn_count,
        "transcript": [
            {"speaker": entry.speaker, "text": entry.text, "ts": entry.ts,
             **({"payload": entry.payload} if entry.payload is not None else {})}
            for entry in session.transcript
        ],
    }


class SessionStore:
    """In-memory sessions backed by the journal; one lock per session."""

    def __init__(self, engine: DialogEngine, journal_path):
        self.engine = engine
        self.journal_path = Path(journal_path)
        self.sessions: dict[str, DialogSession] = {}
        self._store_lock = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._replay()

    def _replay(self) -> None:
        if not self.journal_path.exists():
            return
        with open(self.journal_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = json.loads(line)
                if record["event"] == "create":
                    session = self.engine.new_session(record["session_id"], record["ts"])
                    self.sessions[session.id] = session
                elif record["event"] == "message":
                    session = self.sessions[record["session_id"]]
                    self.engine.process_turn(session, record["text"], record["ts"])

    def _journal(self, record: dict) -> None:
        with open(self.journal_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")
            fh.flush()

    def create_session(self, ts: float | None = None) -> DialogSession:
        ts = time.time() if ts is None else ts
        session_id = uuid.uuid4().hex
        session = self.engine.new_session(session_id, ts)
        with self._store_lock:
            self.sessions[session_id] = session
        self._journal({"event": "create", "session_id": session_id, "ts": ts})
        return session

    def get(self, session_id: str) -> DialogSession:
        with self._store_lock:
            session = self.sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        return session

    def post_message(self, session_id: str, text: str,
                     ts: float | None = None) -> tuple[DialogSession, AdvisorReply]:
        ts = time.time() if ts is None else ts
        session = self.get(session_id)
        with self._session_locks[session_id]:
            reply = self.engine.process_turn(session, text, ts)
            self._journal({"event": "message", "session_id": session_id,
                           "text": text, "ts": ts})
        return session, reply


class MessageIn(BaseModel):
    text: str


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def create_app(store: SessionStore) -> FastAPI:
    app = FastAPI(title="beliefdialog advisor service")

    @app.get("/api/health")
    def health():
        return {"status": "ok", "sessions": len(store.sessions)}

    @app.post("/api/sessions", status_code=201)
    def create_session():
        session = store.create_session()
        return {
            "session_id": session.id,
            "greeting": session.transcript[0].text,
            "status": session.status,
        }

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            session = store.get(session_id)
        except KeyError:
            return _error(404, "not_found", f"no session {session_id}")
        return session_snapshot(session)

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(session_id: str, message: MessageIn):
        if not message.text.strip():
            return _error(400, "validation", "message text must be non-empty")
        try:
            session = store.get(session_id)
        except KeyError:
            return _error(404, "not_found", f"no session {session_id}")
        if session.status != "active":
            return _error(409, "conflict", f"session {session_id} is completed")
        try:
            session, reply = store.post_message(session_id, message.text)
        except InputError as exc:
            return _error(409, "conflict", str(exc))
        except BeliefDialogError as exc:
            return _error(500, "engine_error", str(exc))
        return reply_payload(session, reply)

    return app
