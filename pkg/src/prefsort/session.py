"""The live elicitation loop as a single-writer state machine.

A session alternates between selecting the next question and waiting for
the decision maker's answer, until the question budget is spent or the
target accuracy is reached, then fits the final model and sorts whatever
was never asked about.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from prefsort.core import (
    AssignmentExample,
    DecisionMatrix,
    NormalizedModel,
    UtilityModel,
    assign_category,
    build_scales,
    comprehensive_utility,
    normalize,
)
from prefsort.errors import InvalidInputError, StateConflictError
from prefsort.inference import (
    InferenceOutcome,
    PreferenceInstance,
    fit,
    refine_complexity,
)
from prefsort.strategy import SelectionResult, Strategy, select

SELECTING = "selecting"
AWAITING_ANSWER = "awaiting_answer"
FINISHED = "finished"


@dataclass(frozen=True)
class BudgetT:
    """Stop after a fixed number of answered questions."""

    T: int

    def __post_init__(self):
        if self.T < 0:
            raise InvalidInputError("question budget must be >= 0")


@dataclass(frozen=True)
class TargetAccuracy:
    """Stop once the fitted model reaches the target accuracy on the
    labelled hold-out. Requires labels for every alternative."""

    target: float
    labels: dict[str, int]

    def __post_init__(self):
        if not 0.0 < self.target <= 1.0:
            raise InvalidInputError("target accuracy must lie in (0, 1]")
        if not self.labels:
            raise InvalidInputError("target-accuracy termination needs labels")


@dataclass(frozen=True)
class SessionConfig:
    strategy: Strategy
    alpha: float
    q: int
    subinterval_counts: tuple[int, ...]
    termination: BudgetT | TargetAccuracy
    rng_seed: int = 0
    monotone_mode: bool = False


@dataclass(frozen=True)
class AnswerRecord:
    iteration: int
    asked: str
    answer: int
    scores: dict[str, float]


@dataclass(frozen=True)
class FinalResult:
    model: UtilityModel
    normalized: NormalizedModel
    assignments: dict[str, int]  # non-reference alternatives only
    accuracy_all: float | None = None
    accuracy_nonref: float | None = None
    early: bool = False
    objective: float = 0.0
    inconsistency: float = 0.0


class Session:
    """One decision maker's elicitation; mutate from a single writer only."""

    def __init__(
        self,
        matrix: DecisionMatrix,
        examples: list[AssignmentExample],
        config: SessionConfig,
        history: list[AnswerRecord] | None = None,
        status: str = SELECTING,
        pending_question: str | None = None,
    ):
        self.matrix = matrix
        self.config = config
        self.scales = tuple(build_scales(matrix, config.subinterval_counts))
        self.examples = list(examples)
        self.history = list(history or [])
        self.status = status
        self.pending_question = pending_question
        self._fit_cache: dict[int, tuple[InferenceOutcome, UtilityModel]] = {}
        self._selection_cache: dict[int, SelectionResult] = {}

    # -- construction -----------------------------------------------------

    @classmethod
    def start(
        cls,
        matrix: DecisionMatrix,
        initial_examples: list[AssignmentExample],
        config: SessionConfig,
    ) -> "Session":
        if not initial_examples:
            raise InvalidInputError(
                "at least one initial assignment example is required"
            )
        if isinstance(config.termination, TargetAccuracy):
            missing = [
                a for a in matrix.alternative_ids
                if a not in config.termination.labels
            ]
            if missing:
                raise InvalidInputError(
                    f"target-accuracy labels missing for {missing[:3]}..."
                )
        session = cls(matrix, list(initial_examples), config)
        # instance construction validates categories, duplicates, alpha, q
        session.instance()
        return session

    # -- derived views ----------------------------------------------------

    @property
    def t(self) -> int:
        return len(self.history)

    @property
    def reference_ids(self) -> tuple[str, ...]:
        return tuple(ex.alternative_id for ex in self.examples)

    def candidates(self) -> list[str]:
        refs = set(self.reference_ids)
        return [a for a in self.matrix.alternative_ids if a not in refs]

    def instance(self) -> PreferenceInstance:
        return PreferenceInstance(
            self.matrix,
            self.scales,
            tuple(self.examples),
            self.config.q,
            self.config.alpha,
            self.config.monotone_mode,
        )

    def fitted(self) -> tuple[InferenceOutcome, UtilityModel]:
        """Max-margin fit plus refinement on the current examples, cached
        per iteration."""
        if self.t not in self._fit_cache:
            outcome = fit(self.instance())
            self._fit_cache[self.t] = (outcome, refine_complexity(self.instance(), outcome))
        return self._fit_cache[self.t]

    def last_selection(self) -> SelectionResult | None:
        return self._selection_cache.get(self.t)

    # -- the elicitation loop ---------------------------------------------

    def next_question(self) -> str | None:
        """Select what to ask next, or report termination with ``None``."""
        if self.status == AWAITING_ANSWER:
            raise StateConflictError(
                f"answer for {self.pending_question!r} still pending"
            )
        if self.status == FINISHED:
            return None
        if self._terminated():
            self.status = FINISHED
            return None
        strategy = self.config.strategy
        model = self.fitted()[1] if strategy.needs_model else None
        seed = None
        if strategy.kind == "RAND":
            seed = int(
                np.random.SeedSequence(
                    (self.config.rng_seed, self.t)
                ).generate_state(1)[0]
            )
        result = select(
            strategy, self.instance(), self.candidates(), model=model, rng_seed=seed
        )
        self._selection_cache[self.t] = result
        self.pending_question = result.chosen
        self.status = AWAITING_ANSWER
        return result.chosen

    def _terminated(self) -> bool:
        if not self.candidates():
            return True
        term = self.config.termination
        if isinstance(term, BudgetT):
            return self.t >= term.T
        acc = self.evaluate_accuracy(term.labels, scope="nonreference")
        return acc >= term.target

    def submit_answer(self, alternative_id: str, category: int) -> None:
        """Record the decision maker's answer to the pending question."""
        if self.status != AWAITING_ANSWER:
            raise StateConflictError("no question is awaiting an answer")
        if alternative_id != self.pending_question:
            raise StateConflictError(
                f"pending question is {self.pending_question!r}, "
                f"not {alternative_id!r}"
            )
        if not 1 <= int(category) <= self.config.q:
            raise InvalidInputError(
                f"category {category} outside 1..{self.config.q}"
            )
        scores = self._selection_cache[self.t].scores
        self.history.append(
            AnswerRecord(self.t, alternative_id, int(category), dict(scores))
        )
        self.examples.append(AssignmentExample(alternative_id, int(category)))
        self.pending_question = None
        self.status = SELECTING

    # -- evaluation and finalization ---------------------------------------

    def assignments(self, model: UtilityModel | None = None) -> dict[str, int]:
        model = model or self.fitted()[1]
        return {
            aid: assign_category(
                model, comprehensive_utility(model, self.matrix.performances[i])
            )
            for i, aid in enumerate(self.matrix.alternative_ids)
        }

    def evaluate_accuracy(
        self,
        labels: dict[str, int],
        scope: Literal["nonreference", "all"] = "nonreference",
    ) -> float:
        """Share of scoped alternatives whose fitted category matches the label."""
        if scope == "nonreference":
            scoped = self.candidates()
        elif scope == "all":
            scoped = list(self.matrix.alternative_ids)
        else:
            raise InvalidInputError(f"unknown scope {scope!r}")
        missing = [a for a in scoped if a not in labels]
        if missing:
            raise InvalidInputError(f"labels missing for {missing[:3]}...")
        if not scoped:
            return 1.0
        assigned = self.assignments()
        hits = sum(1 for a in scoped if assigned[a] == labels[a])
        return hits / len(scoped)

    def finalize(self, labels: dict[str, int] | None = None) -> FinalResult:
        """Fit on everything collected and sort the never-asked alternatives."""
        outcome, refined = self.fitted()
        assigned = self.assignments(refined)
        refs = set(self.reference_ids)
        nonref = {a: c for a, c in assigned.items() if a not in refs}
        acc_all = acc_nonref = None
        if labels is None and isinstance(self.config.termination, TargetAccuracy):
            labels = self.config.termination.labels
        if labels is not None:
            covered_all = all(a in labels for a in assigned)
            if covered_all:
                acc_all = sum(
                    1 for a, c in assigned.items() if labels[a] == c
                ) / len(assigned)
            if nonref and all(a in labels for a in nonref):
                acc_nonref = sum(
                    1 for a, c in nonref.items() if labels[a] == c
                ) / len(nonref)
        return FinalResult(
            model=refined,
            normalized=normalize(refined),
            assignments=nonref,
            accuracy_all=acc_all,
            accuracy_nonref=acc_nonref,
            early=self.status != FINISHED,
            objective=outcome.objective,
            inconsistency=outcome.inconsistency,
        )

    # -- persistence --------------------------------------------------------

    def snapshot(self) -> dict:
        """JSON-safe state sufficient for bit-exact resume (the RNG stream is
        derived from the seed and iteration, so no generator state is stored)."""
        term = self.config.termination
        if isinstance(term, BudgetT):
            term_doc = {"kind": "budget", "T": term.T}
        else:
            term_doc = {
                "kind": "target",
                "target": term.target,
                "labels": dict(term.labels),
            }
        return {
            "config": {
                "strategy": self.config.strategy.kind,
                "tau": self.config.strategy.tau,
                "alpha": self.config.alpha,
                "q": self.config.q,
                "subinterval_counts": list(self.config.subinterval_counts),
                "termination": term_doc,
                "rng_seed": self.config.rng_seed,
                "monotone_mode": self.config.monotone_mode,
            },
            "examples": [
                {"id": ex.alternative_id, "category": ex.category}
                for ex in self.examples
            ],
            "history": [
                {
                    "iteration": r.iteration,
                    "asked": r.asked,
                    "answer": r.answer,
                    "scores": r.scores,
                }
                for r in self.history
            ],
            "pending_question": self.pending_question,
            "status": self.status,
        }

    @classmethod
    def restore(cls, matrix: DecisionMatrix, doc: dict) -> "Session":
        cfg = doc["config"]
        term_doc = cfg["termination"]
        if term_doc["kind"] == "budget":
            term = BudgetT(int(term_doc["T"]))
        else:
            term = TargetAccuracy(
                float(term_doc["target"]),
                {k: int(v) for k, v in term_doc["labels"].items()},
            )
        config = SessionConfig(
            strategy=Strategy(cfg["strategy"], cfg.get("tau", 1.0)),
            alpha=float(cfg["alpha"]),
            q=int(cfg["q"]),
            subinterval_counts=tuple(int(s) for s in cfg["subinterval_counts"]),
            termination=term,
            rng_seed=int(cfg["rng_seed"]),
            monotone_mode=bool(cfg["monotone_mode"]),
        )
        examples = [
            AssignmentExample(e["id"], int(e["category"])) for e in doc["examples"]
        ]
        history = [
            AnswerRecord(
                int(r["iteration"]), r["asked"], int(r["answer"]),
                {k: float(v) for k, v in r["scores"].items()},
            )
            for r in doc["history"]
        ]
        session = cls(
            matrix,
            examples,
            config,
            history=history,
            status=doc["status"],
            pending_question=doc.get("pending_question"),
        )
        if session.status == AWAITING_ANSWER and session.pending_question:
            # re-derive the selection snapshot for the pending iteration
            session.next_question_resume()
        return session

    def next_question_resume(self) -> None:
        """Recompute the pending selection after a restore; deterministic, so
        it reproduces the pre-snapshot choice."""
        pending = self.pending_question
        self.status = SELECTING
        self.pending_question = None
        chosen = self.next_question()
        if chosen != pending:
            raise StateConflictError(
                f"restored selection {chosen!r} does not match the "
                f"snapshot's pending question {pending!r}"
            )
