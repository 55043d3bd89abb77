"""HTTP/JSON facade over the pipeline: sessions, background mining, Pareto
queries, feedback, evaluation, and plot data.

One mining worker per session mutates the engine; request handlers take the
session lock only long enough to read a consistent snapshot or to apply a
feedback command at an iteration boundary. GETs are side-effect free.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .dataset_io import load_dataset
from .mining import FeedbackCommand, MiningConfig, MiningEngine
from .model import DataError
from .objectives import OBJECTIVE_NAMES, EvaluationIndex, baseline_random, break_even, cost
from .rules import RulesetParseError, parse_rule, parse_ruleset, print_ruleset

IDLE = "IDLE"
RUNNING = "RUNNING"
PAUSED = "PAUSED"


def sig6(value):
    """Decimal with 6 significant digits; infinities map to None."""
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return None
        return float(f"{value:.6g}")
    return value


def _vector_payload(vector):
    return {name: sig6(v) for name, v in vector.as_dict().items()}


@dataclass
class Session:
    session_id: str
    engine: MiningEngine
    state: str = IDLE
    lock: threading.RLock = field(default_factory=threading.RLock)
    _thread: threading.Thread | None = None
    _stop_requested: bool = False

    def start(self):
        with self.lock:
            self.state = RUNNING
            if self._thread is None or not self._thread.is_alive():
                self._stop_requested = False
                self._thread = threading.Thread(target=self._loop, daemon=True)
                self._thread.start()

    def pause(self):
        with self.lock:
            if self.state == RUNNING:
                self.state = PAUSED

    def stop(self):
        with self.lock:
            self.state = IDLE
            self._stop_requested = True

    def _loop(self):
        import time

        while not self._stop_requested:
            if self.state != RUNNING:
                time.sleep(0.02)
                continue
            with self.lock:
                if self.state == RUNNING:
                    self.engine.iterate()

    def snapshot(self):
        with self.lock:
            return self.engine.generation, list(self.engine.archive.entries)

    def apply_feedback(self, command: FeedbackCommand) -> int:
        """Apply at an iteration boundary; returns the archive size delta."""
        with self.lock:
            before = len(self.engine.archive.entries)
            self.engine.apply_feedback(command)
            return len(self.engine.archive.entries) - before


class SessionCreate(BaseModel):
    dataset_path: str
    seed: int = 0


class EvaluateRequest(BaseModel):
    ruleset_text: str
    dataset_path: str | None = None


class FeedbackRequest(BaseModel):
    command: str
    rule_text: str | None = None
    feature: str | None = None
    ticket: str | None = None
    weights: dict[str, float] | None = None
    predicate: list | None = None  # [objective, op, value]
    command_id: str | None = None


def _parse_rule_text(text: str):
    body = text.strip()
    if not body.startswith("("):
        body = f"({body})"
    try:
        return parse_rule(body)
    except (RulesetParseError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=f"cannot parse rule: {exc}")


def _to_command(req: FeedbackRequest) -> FeedbackCommand:
    rule = _parse_rule_text(req.rule_text) if req.rule_text else None
    predicate = tuple(req.predicate) if req.predicate else None
    weights = tuple(sorted(req.weights.items())) if req.weights else None
    return FeedbackCommand(
        kind=req.command,
        rule=rule,
        feature=req.feature,
        ticket=req.ticket,
        weights=weights,
        predicate=predicate,
        command_id=req.command_id,
    )


def create_app(config: MiningConfig | None = None) -> FastAPI:
    app = FastAPI(title="remark-miner")
    sessions: dict[str, Session] = {}
    counter = {"n": 0}
    base_config = config or MiningConfig()

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return session

    @app.get("/session")
    def list_sessions():
        return [
            {"session_id": sid, "state": s.state, "generation": s.engine.generation}
            for sid, s in sorted(sessions.items())
        ]

    @app.post("/session")
    def create_session(req: SessionCreate):
        try:
            dataset = load_dataset(req.dataset_path)
        except DataError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        counter["n"] += 1
        session_id = f"s-{counter['n']}"
        cfg = MiningConfig(**{**base_config.__dict__, "seed": req.seed})
        try:
            sessions[session_id] = Session(session_id, MiningEngine(dataset, cfg))
        except DataError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"session_id": session_id}

    @app.post("/session/{session_id}/start")
    def start(session_id: str):
        session = get_session(session_id)
        session.start()
        return {"state": session.state}

    @app.post("/session/{session_id}/pause")
    def pause(session_id: str):
        session = get_session(session_id)
        session.pause()
        return {"state": session.state}

    @app.post("/session/{session_id}/stop")
    def stop(session_id: str):
        session = get_session(session_id)
        session.stop()
        return {"state": session.state}

    @app.get("/session/{session_id}/pareto")
    def pareto(session_id: str, x: str, y: str):
        session = get_session(session_id)
        for name in (x, y):
            if name not in OBJECTIVE_NAMES:
                raise HTTPException(status_code=422, detail=f"unknown objective {name!r}")
        generation, entries = session.snapshot()
        values = sorted(
            (
                {
                    "x": sig6(getattr(e.vector, x)),
                    "y": sig6(getattr(e.vector, y)),
                    "ruleset_id": e.rid,
                }
                for e in entries
            ),
            key=lambda p: (p["x"], p["y"], p["ruleset_id"]),
        )
        return {"generation": generation, "x": x, "y": y, "points": values}

    @app.get("/session/{session_id}/ruleset/{rid}")
    def ruleset(session_id: str, rid: str):
        session = get_session(session_id)
        _, entries = session.snapshot()
        entry = next((e for e in entries if e.rid == rid), None)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown ruleset {rid}")
        tickets = max(session.engine.index.ticket_count, 1)
        return {
            "ruleset_id": entry.rid,
            "text": print_ruleset(entry.ruleset),
            "objectives": _vector_payload(entry.vector),
            "break_even": {
                k: sig6(v) for k, v in break_even(entry.vector, tickets).items()
            },
        }

    @app.post("/session/{session_id}/feedback")
    def feedback(session_id: str, req: FeedbackRequest):
        session = get_session(session_id)
        command = _to_command(req)
        try:
            delta = session.apply_feedback(command)
        except DataError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"acknowledged": True, "archive_delta": delta}

    @app.get("/session/{session_id}/sample")
    def sample(session_id: str, ruleset: str, n: int = 10):
        session = get_session(session_id)
        _, entries = session.snapshot()
        entry = next((e for e in entries if e.rid == ruleset), None)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown ruleset {ruleset}")
        engine = session.engine
        with session.lock:
            sampled = engine.sample_misclassified(
                entry.ruleset, n, random.Random(f"{ruleset}:{n}")
            )
            records = {r.record_id: r for r in engine.dataset.iter_records()}
            links = [
                (tid, link)
                for tid in sorted(engine.dataset.tickets)
                for link in engine.dataset.tickets[tid].trigger_links
            ]
        out = []
        for rid in sampled:
            record = records[rid]
            matching = [
                str(rule)
                for rule in entry.ruleset.incl
                if rule.matches(record.features)
            ]
            remark_ids = [
                link.remark_id
                for tid, link in links
                if (link.whole_ticket and tid == record.ticket_id)
                or rid in link.triggers
            ]
            out.append(
                {
                    "record_id": rid,
                    "ticket_id": record.ticket_id,
                    "path": record.path,
                    "diff_old": list(record.hunk.old_lines) if record.hunk else [],
                    "diff_new": list(record.hunk.new_lines) if record.hunk else [],
                    "features": {
                        k: sig6(v) if isinstance(v, float) else (None if not isinstance(v, (str, bool, int)) else v)
                        for k, v in record.features.items()
                    },
                    "matching_rules": matching,
                    "remarks": remark_ids,
                }
            )
        return {"ruleset_id": ruleset, "records": out}

    @app.post("/session/{session_id}/evaluate")
    def evaluate_ruleset(session_id: str, req: EvaluateRequest):
        session = get_session(session_id)
        try:
            ruleset = parse_ruleset(req.ruleset_text)
        except RulesetParseError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        if req.dataset_path is not None:
            try:
                index = EvaluationIndex(load_dataset(req.dataset_path))
            except DataError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        else:
            index = session.engine.index
        with session.lock:
            vector = index.evaluate(ruleset)
        tickets = max(index.ticket_count, 1)
        return {
            "objectives": _vector_payload(vector),
            "break_even": {k: sig6(v) for k, v in break_even(vector, tickets).items()},
            "costs": {
                str(int(c)): sig6(cost(vector, c, tickets)) for c in (10.0, 100.0, 1000.0)
            },
        }

    @app.get("/session/{session_id}/baseline")
    def baseline(session_id: str, share: float, seeds: int = 100):
        session = get_session(session_id)
        if not 0 <= share <= 1:
            raise HTTPException(status_code=422, detail="share must be within [0, 1]")
        with session.lock:
            vector = baseline_random(session.engine.index, share, seeds)
        return {"share": share, "seeds": seeds, "objectives": _vector_payload(vector)}

    return app
