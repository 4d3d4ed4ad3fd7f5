"""Investigation sessions over HTTP.

A session is an append-only evidence log on top of the bundled corpus.
The current knowledge base is always corpus + replay(log), so retracting
a row is just filtering the replay; nothing is ever mutated in place.
Query results are recomputed from the log watermark they were asked at,
which keeps persisted sessions byte-identical on reload.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .argumentation import AcceptanceStatus, query as evaluate_query
from .corpus import UnknownScenario, list_scenarios, load_corpus, scenario_bundle
from .dsl import ParseError, parse_query
from .explanation import to_dot, to_json, to_text
from .inference import ReasonerConfig, missing_evidence_hints
from .kb import KBError, KnowledgeBase
from .terms import Layer, Literal


class CreateSessionBody(BaseModel):
    baseScenario: Optional[str] = None


class EvidenceBody(BaseModel):
    fact: str


class QueryBody(BaseModel):
    goal: str
    config: Optional[dict] = None


def _config_from(payload: Optional[dict]) -> ReasonerConfig:
    payload = payload or {}
    base = ReasonerConfig()
    return ReasonerConfig(
        max_depth=int(payload.get("maxDepth", base.max_depth)),
        abduction=bool(payload.get("abduction", base.abduction)),
        game_depth=int(payload.get("gameDepth", base.game_depth)),
        hint_bound=int(payload.get("hintBound", base.hint_bound)),
    )


def _config_dict(payload: Optional[dict]) -> dict:
    cfg = _config_from(payload)
    return {
        "maxDepth": cfg.max_depth,
        "abduction": cfg.abduction,
        "gameDepth": cfg.game_depth,
        "hintBound": cfg.hint_bound,
    }


@dataclass
class Session:
    id: str
    base_scenario: Optional[str]
    created: float
    # evidence log rows: assert {seq, op, fact, ts}, retract {seq, op, target, fact, ts}
    log: list[dict] = field(default_factory=list)
    # qid -> {qid, goal, config, watermark, digest, ts}
    queries: dict[str, dict] = field(default_factory=dict)
    next_seq: int = 1
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def active_facts(self, watermark: Optional[int] = None) -> list[str]:
        limit = self.next_seq if watermark is None else watermark + 1
        retracted = {
            row["target"] for row in self.log
            if row["op"] == "retract" and row["seq"] < limit
        }
        return [
            row["fact"] for row in self.log
            if row["op"] == "assert" and row["seq"] < limit
            and row["seq"] not in retracted
        ]

    def watermark(self) -> int:
        return self.next_seq - 1


class SessionStore:
    """Registry plus optional JSON-lines persistence, one file per session."""

    def __init__(self, state_dir: Optional[str]):
        self.state_dir = Path(state_dir) if state_dir else None
        if self.state_dir is not None:
            self.state_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _path(self, session_id: str) -> Optional[Path]:
        if self.state_dir is None:
            return None
        return self.state_dir / f"{session_id}.jsonl"

    def _append(self, session: Session, record: dict) -> None:
        path = self._path(session.id)
        if path is None:
            return
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def create(self, base_scenario: Optional[str]) -> Session:
        session = Session(id=uuid.uuid4().hex, base_scenario=base_scenario,
                          created=time.time())
        with self._lock:
            self._sessions[session.id] = session
        self._append(session, {"type": "create", "sessionId": session.id,
                               "baseScenario": base_scenario, "ts": session.created})
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is not None:
            return session
        session = self._load(session_id)
        if session is None:
            raise HTTPException(404, detail=f"unknown session {session_id}")
        with self._lock:
            return self._sessions.setdefault(session_id, session)

    def _load(self, session_id: str) -> Optional[Session]:
        path = self._path(session_id)
        if path is None or not path.exists():
            return None
        session: Optional[Session] = None
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                record = json.loads(line)
                kind = record.pop("type")
                if kind == "create":
                    session = Session(id=record["sessionId"],
                                      base_scenario=record["baseScenario"],
                                      created=record["ts"])
                elif session is None:
                    return None
                elif kind == "evidence":
                    session.log.append(record)
                    session.next_seq = record["seq"] + 1
                elif kind == "query":
                    session.queries[record["qid"]] = record
        return session

    def record_evidence(self, session: Session, row: dict) -> None:
        session.log.append(row)
        session.next_seq = row["seq"] + 1
        self._append(session, {"type": "evidence", **row})

    def record_query(self, session: Session, entry: dict) -> None:
        session.queries[entry["qid"]] = entry
        self._append(session, {"type": "query", **entry})


def _kb_for(session: Session, watermark: Optional[int] = None) -> KnowledgeBase:
    kb = load_corpus()
    for text in session.active_facts(watermark):
        lit = parse_query(text)
        kb = kb.add_fact(lit, Layer.TECHNICAL, provenance="evidence")
    return kb


def _parse_fact(text: str) -> Literal:
    try:
        return parse_query(text)
    except ParseError as err:
        raise HTTPException(422, detail={"error": "parseError", **err.to_dict()})


def _run(kb: KnowledgeBase, goal: Literal, cfg: ReasonerConfig) -> tuple[list, list]:
    answers = evaluate_query(kb, goal, cfg)
    hints = []
    if not any(a.status is AcceptanceStatus.SCEPTICAL for a in answers):
        hints = missing_evidence_hints(kb, goal, config=cfg)
    return answers, hints


def _query_response(session: Session, qid: str, entry: dict) -> dict:
    """Rebuild the full response for a recorded query; deterministic."""
    kb = _kb_for(session, watermark=entry["watermark"])
    goal = parse_query(entry["goal"])
    cfg = _config_from(entry["config"])
    answers, hints = _run(kb, goal, cfg)
    return {
        "qid": qid,
        "goal": entry["goal"],
        "watermark": entry["watermark"],
        "config": entry["config"],
        "answers": [to_json(kb, a, goal=goal) for a in answers],
        "hints": [h.to_dict() for h in hints],
    }


def _digest(doc: dict) -> str:
    return hashlib.sha256(
        json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def create_app(state_dir: Optional[str] = None) -> FastAPI:
    if state_dir is None:
        state_dir = os.environ.get("ABR_STATE_DIR") or None
    store = SessionStore(state_dir)
    app = FastAPI(title="abr", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    @app.post("/sessions")
    def create_session(body: CreateSessionBody) -> dict:
        facts: tuple[str, ...] = ()
        if body.baseScenario is not None:
            try:
                facts = scenario_bundle(body.baseScenario).evidence_facts
            except UnknownScenario as err:
                raise HTTPException(400, detail=str(err))
        session = store.create(body.baseScenario)
        with session.lock:
            now = time.time()
            for text in facts:
                store.record_evidence(session, {
                    "seq": session.next_seq, "op": "assert", "fact": text, "ts": now,
                })
        return {"sessionId": session.id}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        session = store.get(session_id)
        with session.lock:
            return {
                "sessionId": session.id,
                "baseScenario": session.base_scenario,
                "evidenceLog": list(session.log),
                "activeFacts": session.active_facts(),
                "queryHistory": [
                    {k: entry[k] for k in ("qid", "goal", "ts", "digest")}
                    for entry in session.queries.values()
                ],
            }

    @app.post("/sessions/{session_id}/evidence")
    def add_evidence(session_id: str, body: EvidenceBody) -> dict:
        session = store.get(session_id)
        lit = _parse_fact(body.fact)
        with session.lock:
            # reject what the KB would reject before logging anything
            try:
                _kb_for(session).add_fact(lit, Layer.TECHNICAL, provenance="evidence")
            except KBError as err:
                raise HTTPException(
                    422, detail={"error": "badFact", "message": str(err),
                                 "line": 1, "col": 1})
            seq = session.next_seq
            store.record_evidence(session, {
                "seq": seq, "op": "assert", "fact": str(lit), "ts": time.time(),
            })
        return {"seq": seq}

    @app.delete("/sessions/{session_id}/evidence/{seq}")
    def retract_evidence(session_id: str, seq: int) -> dict:
        session = store.get(session_id)
        with session.lock:
            live = {
                row["seq"]: row["fact"] for row in session.log
                if row["op"] == "assert"
            }
            for row in session.log:
                if row["op"] == "retract":
                    live.pop(row["target"], None)
            if seq not in live:
                raise HTTPException(404, detail=f"no active evidence with seq {seq}")
            row = {"seq": session.next_seq, "op": "retract", "target": seq,
                   "fact": live[seq], "ts": time.time()}
            store.record_evidence(session, row)
        return {"retracted": seq, "seq": row["seq"]}

    @app.post("/sessions/{session_id}/query")
    def run_query(session_id: str, body: QueryBody) -> dict:
        session = store.get(session_id)
        try:
            parse_query(body.goal)
        except ParseError as err:
            raise HTTPException(422, detail={"error": "parseError", **err.to_dict()})
        with session.lock:
            qid = f"q{len(session.queries) + 1}"
            entry = {
                "qid": qid,
                "goal": body.goal,
                "config": _config_dict(body.config),
                "watermark": session.watermark(),
                "ts": time.time(),
            }
            doc = _query_response(session, qid, entry)
            entry["digest"] = _digest(doc)
            store.record_query(session, entry)
        return doc

    @app.get("/sessions/{session_id}/explanations/{qid}")
    def get_explanation(
        session_id: str,
        qid: str,
        format: str = Query("json", pattern="^(text|json|dot)$"),
        answer: int = 0,
    ) -> Response:
        session = store.get(session_id)
        with session.lock:
            entry = session.queries.get(qid)
            if entry is None:
                raise HTTPException(404, detail=f"unknown query {qid}")
            kb = _kb_for(session, watermark=entry["watermark"])
        goal = parse_query(entry["goal"])
        answers, hints = _run(kb, goal, _config_from(entry["config"]))
        if not 0 <= answer < len(answers):
            raise HTTPException(
                404, detail=f"query {qid} has {len(answers)} answers, "
                            f"no index {answer}")
        picked = answers[answer]
        if format == "text":
            body = to_text(kb, picked, goal=goal, hints=hints)
            return Response(content=body, media_type="text/plain")
        if format == "dot":
            return Response(content=to_dot(kb, picked),
                            media_type="text/vnd.graphviz")
        doc = to_json(kb, picked, goal=goal, hints=hints)
        return Response(content=json.dumps(doc, indent=2, sort_keys=True),
                        media_type="application/json")

    @app.get("/scenarios")
    def scenarios() -> dict:
        return {
            "scenarios": [
                {"name": b.name, "notes": b.notes,
                 "evidenceFacts": list(b.evidence_facts)}
                for b in list_scenarios()
            ]
        }

    return app
