"""HTTP facade over datasets, live sessions and fitted models.

State is stored as JSON documents under a data directory, so sessions
survive restarts.  Question selection runs on a worker thread; clients
either poll (default) or pass ``wait=true`` to long-poll until the
selection lands.  All errors use one envelope: ``{"code": ..., "message":
...}``.
"""

from __future__ import annotations

import json
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from dataclasses import replace as dc_replace
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from prefsort.core import AssignmentExample, DecisionMatrix
from prefsort.errors import (
    InvalidInputError,
    PrefsortError,
    SolverFailure,
    StateConflictError,
)
from prefsort.inference import outcome_to_json
from prefsort.io import format_dataset_csv, parse_dataset_csv
from prefsort.session import (
    AWAITING_ANSWER,
    FINISHED,
    SELECTING,
    BudgetT,
    Session,
    SessionConfig,
    TargetAccuracy,
)
from prefsort.strategy import Strategy

SELECT_TIMEOUT = 300.0  # seconds a long-poll will wait for a selection


class ApiError(PrefsortError):
    def __init__(self, code: str, message: str, status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status


def _not_found(what: str) -> ApiError:
    return ApiError("not_found", f"{what} not found", 404)


@dataclass
class _SessionBox:
    session: Session
    dataset_id: str
    created_at: str
    lock: threading.Lock = field(default_factory=threading.Lock)
    selecting: Future | None = None


class ServiceState:
    """Everything the endpoints share: storage, sessions, the worker pool."""

    def __init__(self, data_dir: str | Path, seed: int = 0, workers: int = 2):
        self.data_dir = Path(data_dir)
        (self.data_dir / "datasets").mkdir(parents=True, exist_ok=True)
        (self.data_dir / "sessions").mkdir(parents=True, exist_ok=True)
        self.seed = seed
        self.pool = ThreadPoolExecutor(max_workers=workers)
        self.counter_lock = threading.Lock()
        self.boxes: dict[str, _SessionBox] = {}
        self.matrices: dict[str, tuple[DecisionMatrix, dict[str, int] | None]] = {}
        self._counters = {"ds": 0, "se": 0}
        self._restore_counters()

    def _restore_counters(self):
        for prefix, sub in (("ds", "datasets"), ("se", "sessions")):
            highest = 0
            for f in (self.data_dir / sub).glob(f"{prefix}-*.json"):
                try:
                    highest = max(highest, int(f.stem.split("-")[1]))
                except (IndexError, ValueError):
                    continue
            self._counters[prefix] = highest

    def new_id(self, prefix: str) -> str:
        with self.counter_lock:
            self._counters[prefix] += 1
            return f"{prefix}-{self._counters[prefix]:04d}"

    # -- datasets ----------------------------------------------------------

    def save_dataset(self, ds_id: str, matrix: DecisionMatrix,
                     labels: dict[str, int] | None):
        doc = {
            "id": ds_id,
            "csv": format_dataset_csv(matrix, labels),
            "created_at": _now(),
        }
        (self.data_dir / "datasets" / f"{ds_id}.json").write_text(
            json.dumps(doc), encoding="utf-8"
        )
        self.matrices[ds_id] = (matrix, labels)

    def load_dataset(self, ds_id: str) -> tuple[DecisionMatrix, dict[str, int] | None]:
        if ds_id in self.matrices:
            return self.matrices[ds_id]
        path = self.data_dir / "datasets" / f"{ds_id}.json"
        if not path.exists():
            raise _not_found(f"dataset {ds_id}")
        doc = json.loads(path.read_text(encoding="utf-8"))
        matrix, labels = parse_dataset_csv(doc["csv"])
        self.matrices[ds_id] = (matrix, labels)
        return matrix, labels

    # -- sessions ----------------------------------------------------------

    def persist_session(self, sid: str):
        box = self.boxes[sid]
        doc = {
            "id": sid,
            "dataset_id": box.dataset_id,
            "created_at": box.created_at,
            "snapshot": box.session.snapshot(),
        }
        (self.data_dir / "sessions" / f"{sid}.json").write_text(
            json.dumps(doc), encoding="utf-8"
        )

    def get_box(self, sid: str) -> _SessionBox:
        if sid in self.boxes:
            return self.boxes[sid]
        path = self.data_dir / "sessions" / f"{sid}.json"
        if not path.exists():
            raise _not_found(f"session {sid}")
        doc = json.loads(path.read_text(encoding="utf-8"))
        matrix, _ = self.load_dataset(doc["dataset_id"])
        snapshot = dict(doc["snapshot"])
        # a restart may have interrupted a selection; recompute it lazily
        resume_selecting = snapshot.get("status") == AWAITING_ANSWER
        session = Session.restore(matrix, snapshot)
        box = _SessionBox(session, doc["dataset_id"], doc["created_at"])
        self.boxes[sid] = box
        if not resume_selecting and session.status == SELECTING:
            self.schedule_selection(sid)
        return box

    def schedule_selection(self, sid: str):
        box = self.boxes[sid]
        if box.selecting is not None and not box.selecting.done():
            return

        def work():
            with box.lock:
                box.session.next_question()
                self.persist_session(sid)

        box.selecting = self.pool.submit(work)

    def await_selection(self, sid: str, wait: bool):
        box = self.boxes[sid]
        fut = box.selecting
        if fut is None:
            return
        if wait:
            fut.result(timeout=SELECT_TIMEOUT)
        elif fut.done():
            fut.result()  # propagate worker errors


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _session_payload(state: ServiceState, sid: str) -> dict:
    box = state.boxes[sid]
    s = box.session
    term = s.config.termination
    payload = {
        "id": sid,
        "dataset_id": box.dataset_id,
        "status": s.status,
        "iteration": s.t,
        "pending_question": s.pending_question,
        "reference_ids": list(s.reference_ids),
        "candidate_ids": s.candidates(),
        "q": s.config.q,
        "strategy": s.config.strategy.kind,
        "progress": {
            "answered": s.t,
            "budget": term.T if isinstance(term, BudgetT) else None,
            "target_accuracy": (
                term.target if isinstance(term, TargetAccuracy) else None
            ),
        },
        "history": [
            {"iteration": r.iteration, "asked": r.asked, "answer": r.answer}
            for r in s.history
        ],
    }
    if s.status == AWAITING_ANSWER and s.pending_question is not None:
        row = s.matrix.row(s.pending_question)
        payload["question"] = {
            "alternative_id": s.pending_question,
            "performances": {
                name: float(v)
                for name, v in zip(s.matrix.criterion_names, row)
            },
            "categories": list(range(1, s.config.q + 1)),
        }
        sel = s.last_selection()
        if sel is not None:
            payload["scores"] = {k: float(v) for k, v in sel.scores.items()}
    if s.status == FINISHED:
        payload["final"] = _final_payload(s)
    return payload


def _final_payload(s: Session) -> dict:
    result = s.finalize()
    doc = {
        "assignments": result.assignments,
        "model": {
            "criteria": [
                {
                    "name": s.matrix.criterion_names[j],
                    "breakpoints": list(result.model.scales[j].breakpoints),
                    "utilities": list(result.model.breakpoint_utilities[j]),
                }
                for j in range(result.model.m)
            ],
            "thresholds": list(result.model.thresholds),
            "epsilon": result.model.epsilon,
        },
        "normalized": {
            "utilities": [list(u) for u in result.normalized.normalized_utilities],
            "thresholds": list(result.normalized.normalized_thresholds),
            "epsilon": result.normalized.epsilon_s,
        },
        "objective": result.objective,
        "inconsistency": result.inconsistency,
        "early": result.early,
        "accuracy_all": result.accuracy_all,
        "accuracy_nonref": result.accuracy_nonref,
    }
    return doc


def create_app(
    data_dir: str | Path, seed: int = 0, workers: int = 2,
    static_dir: str | Path | None = None,
) -> FastAPI:
    state = ServiceState(data_dir, seed=seed, workers=workers)
    app = FastAPI(title="prefsort", version="0.1.0")
    app.state.service = state

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message},
        )

    @app.exception_handler(InvalidInputError)
    async def _invalid(_req: Request, exc: InvalidInputError):
        return JSONResponse(
            status_code=400, content={"code": "invalid_input", "message": str(exc)}
        )

    @app.exception_handler(StateConflictError)
    async def _conflict(_req: Request, exc: StateConflictError):
        return JSONResponse(
            status_code=409, content={"code": "state_conflict", "message": str(exc)}
        )

    @app.exception_handler(SolverFailure)
    async def _solver(_req: Request, exc: SolverFailure):
        return JSONResponse(
            status_code=500, content={"code": "solver_failure", "message": str(exc)}
        )

    @app.post("/datasets")
    async def create_dataset(request: Request):
        body = await request.json()
        csv_text = body.get("csv")
        if not isinstance(csv_text, str):
            raise InvalidInputError("body must carry a 'csv' string field")
        matrix, labels = parse_dataset_csv(csv_text)
        ds_id = state.new_id("ds")
        state.save_dataset(ds_id, matrix, labels)
        return {
            "id": ds_id,
            "n": matrix.n,
            "m": matrix.m,
            "criteria": list(matrix.criterion_names),
            "labelled": labels is not None,
        }

    @app.get("/datasets/{ds_id}")
    async def get_dataset(ds_id: str):
        matrix, labels = state.load_dataset(ds_id)
        return {
            "id": ds_id,
            "n": matrix.n,
            "m": matrix.m,
            "criteria": list(matrix.criterion_names),
            "alternative_ids": list(matrix.alternative_ids),
            "performances": matrix.performances.tolist(),
            "labelled": labels is not None,
        }

    @app.post("/sessions")
    async def create_session(request: Request, wait: bool = Query(False)):
        body = await request.json()
        ds_id = body.get("dataset_id")
        if not ds_id:
            raise InvalidInputError("dataset_id is required")
        matrix, labels = state.load_dataset(ds_id)
        term_doc = body.get("termination") or {}
        if term_doc.get("kind") == "target":
            term_labels = term_doc.get("labels") or labels
            if term_labels is None:
                raise InvalidInputError(
                    "target-accuracy termination needs labels (either in the "
                    "request or in the dataset)"
                )
            termination: BudgetT | TargetAccuracy = TargetAccuracy(
                float(term_doc["target"]),
                {k: int(v) for k, v in term_labels.items()},
            )
        else:
            termination = BudgetT(int(term_doc.get("T", 10)))
        config = SessionConfig(
            strategy=Strategy(
                str(body.get("strategy", "ES")), float(body.get("tau", 1.0))
            ),
            alpha=float(body.get("alpha", 0.1)),
            q=int(body["q"]),
            subinterval_counts=tuple(
                int(s) for s in body.get("subinterval_counts", [4] * matrix.m)
            ),
            termination=termination,
            rng_seed=int(body.get("rng_seed", state.seed)),
            monotone_mode=bool(body.get("monotone_mode", False)),
        )
        examples = [
            AssignmentExample(e["id"], int(e["category"]))
            for e in body.get("initial_examples", [])
        ]
        session = Session.start(matrix, examples, config)
        sid = state.new_id("se")
        state.boxes[sid] = _SessionBox(session, ds_id, _now())
        state.persist_session(sid)
        state.schedule_selection(sid)
        state.await_selection(sid, wait)
        return _session_payload(state, sid)

    @app.get("/sessions/{sid}")
    async def get_session(sid: str, wait: bool = Query(False)):
        state.get_box(sid)
        state.await_selection(sid, wait)
        return _session_payload(state, sid)

    @app.post("/sessions/{sid}/answer")
    async def post_answer(sid: str, request: Request, wait: bool = Query(False)):
        body = await request.json()
        box = state.get_box(sid)
        state.await_selection(sid, True)  # selection must land before answering
        aid = body.get("alternative_id")
        category = body.get("category")
        if aid is None or category is None:
            raise InvalidInputError("alternative_id and category are required")
        with box.lock:
            box.session.submit_answer(str(aid), int(category))
            state.persist_session(sid)
        state.schedule_selection(sid)
        state.await_selection(sid, wait)
        return _session_payload(state, sid)

    @app.get("/sessions/{sid}/model")
    async def get_model(sid: str):
        box = state.get_box(sid)
        state.await_selection(sid, True)
        with box.lock:
            outcome, refined = box.session.fitted()
            refined_outcome = dc_replace(outcome, model=refined)
            doc = outcome_to_json(
                refined_outcome, box.session.matrix.criterion_names
            )
            doc["iteration"] = box.session.t
            doc["assignments"] = box.session.assignments(refined)
            sel = box.session.last_selection()
            doc["scores"] = (
                {k: float(v) for k, v in sel.scores.items()} if sel else {}
            )
        return doc

    @app.get("/sessions/{sid}/candidates")
    async def get_candidates(sid: str):
        box = state.get_box(sid)
        state.await_selection(sid, True)
        with box.lock:
            sel = box.session.last_selection()
            payload = {
                "iteration": box.session.t,
                "candidate_ids": box.session.candidates(),
                "scores": {},
                "probabilities": {},
            }
            if sel is not None:
                payload["scores"] = {k: float(v) for k, v in sel.scores.items()}
                if sel.probability_table:
                    payload["probabilities"] = {
                        k: list(p.probabilities)
                        for k, p in sel.probability_table.items()
                    }
        return payload

    @app.post("/sessions/{sid}/finalize")
    async def finalize(sid: str):
        box = state.get_box(sid)
        state.await_selection(sid, True)
        with box.lock:
            result = _final_payload(box.session)
            box.session.status = FINISHED
            box.session.pending_question = None
            state.persist_session(sid)
        return result

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount(
            "/", StaticFiles(directory=Path(static_dir), html=True),
            name="console",
        )

    return app
