"""Question selection: information measures and strategies.

For a candidate alternative, hypothetically assigning it to each category
and re-fitting the max-margin model yields a vector of optima; the vector
(raw, or transformed into a category distribution) scores how informative
asking about that candidate would be.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from prefsort.core import UtilityModel, comprehensive_utility
from prefsort.errors import InvalidInputError, SolverFailure
from prefsort.inference import PreferenceInstance, fit

PROPOSED_KINDS = ("SM", "ER", "ES", "LR", "LS", "MR", "MS")
BENCHMARK_KINDS = ("RAND", "PES", "PLS", "PMS")
ALL_KINDS = PROPOSED_KINDS + BENCHMARK_KINDS


@dataclass(frozen=True)
class InfoVector:
    """Per-category max-margin optima for one candidate."""

    alternative_id: str
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise InvalidInputError("empty information vector")


@dataclass(frozen=True)
class ProbabilityVector:
    probabilities: tuple[float, ...]

    def __post_init__(self):
        ps = tuple(float(p) for p in self.probabilities)
        if any(p < -1e-12 for p in ps):
            raise InvalidInputError("negative probability")
        if abs(sum(ps) - 1.0) > 1e-9:
            raise InvalidInputError("probabilities must sum to 1")
        object.__setattr__(self, "probabilities", ps)


@dataclass(frozen=True)
class Strategy:
    """A question-selection strategy name plus its temperature (P-family)."""

    kind: str
    tau: float = 1.0

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise InvalidInputError(
                f"unknown strategy {self.kind!r}; pick one of {ALL_KINDS}"
            )
        if not self.tau > 0:
            raise InvalidInputError("temperature must be positive")

    @property
    def needs_info_vectors(self) -> bool:
        return self.kind in PROPOSED_KINDS

    @property
    def needs_model(self) -> bool:
        return self.kind in ("PES", "PLS", "PMS")


@dataclass(frozen=True)
class SelectionResult:
    chosen: str
    scores: dict[str, float]
    probability_table: dict[str, ProbabilityVector] | None = None


def info_vectors(
    instance: PreferenceInstance,
    candidates: list[str],
    jobs: int | None = None,
) -> list[InfoVector]:
    """Fit the max-margin model once per (candidate, category) pair.

    The objective denominator grows by one because the hypothetical example
    joins the reference set.  Solves are independent, so they may fan out
    over ``jobs`` threads; aggregation is by index and therefore identical
    regardless of completion order.
    """
    refs = set(instance.reference_ids)
    for aid in candidates:
        instance.matrix.index_of(aid)
        if aid in refs:
            raise InvalidInputError(f"{aid!r} is already a reference alternative")

    tasks = [(aid, h) for aid in candidates for h in range(1, instance.q + 1)]

    def solve_one(task: tuple[str, int]) -> float:
        aid, h = task
        try:
            return fit(instance.with_example(aid, h)).objective
        except SolverFailure as exc:
            raise SolverFailure(
                f"candidate {aid!r}, category {h}: {exc}"
            ) from exc

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(solve_one, tasks))
    else:
        values = [solve_one(t) for t in tasks]

    q = instance.q
    return [
        InfoVector(aid, tuple(values[k * q : (k + 1) * q]))
        for k, aid in enumerate(candidates)
    ]


def transform_relu(v: InfoVector) -> ProbabilityVector:
    """Clip negatives to zero and renormalize; all-nonpositive input is
    maximally uncertain, so it maps to the uniform distribution."""
    clipped = [max(x, 0.0) for x in v.values]
    total = sum(clipped)
    if total <= 0.0:
        return ProbabilityVector(tuple(1.0 / len(clipped) for _ in clipped))
    return ProbabilityVector(tuple(x / total for x in clipped))


def transform_softmax(v: InfoVector) -> ProbabilityVector:
    return _softmax(v.values, 1.0)


def _softmax(values: tuple[float, ...], tau: float) -> ProbabilityVector:
    top = max(values)
    exps = [math.exp(tau * (x - top)) for x in values]
    total = sum(exps)
    return ProbabilityVector(tuple(e / total for e in exps))


def ia_sum(v: InfoVector) -> float:
    return sum(v.values)


def ia_entropy(p: ProbabilityVector) -> float:
    """Shannon entropy in nats; zero-probability terms contribute nothing."""
    return -sum(x * math.log(x) for x in p.probabilities if x > 0.0)


def ia_least_confidence(p: ProbabilityVector) -> float:
    return 1.0 - max(p.probabilities)


def ia_margin(p: ProbabilityVector) -> float:
    """Second-highest minus highest probability: 0 at a top tie, more
    negative the clearer the prediction."""
    if len(p.probabilities) < 2:
        raise InvalidInputError("margin needs at least two categories")
    first = second = -math.inf
    for x in p.probabilities:
        if x > first:
            second = first
            first = x
        elif x > second:
            second = x
    return second - first


_TRANSFORMS = {"R": transform_relu, "S": transform_softmax}
_METRICS = {"E": ia_entropy, "L": ia_least_confidence, "M": ia_margin}


def consistency_degree(model: UtilityModel, u_value: float, q: int) -> list[float]:
    """Signed fit of a utility value to each category's threshold interval."""
    if q != model.q:
        raise InvalidInputError(f"model has {model.q} categories, not {q}")
    b = model.thresholds
    eps = model.epsilon
    out = []
    for h in range(1, q + 1):
        if h == 1:
            out.append(b[1] - eps - u_value)
        elif h == q:
            out.append(u_value - b[q - 1])
        else:
            out.append(min(u_value - b[h - 1], b[h] - eps - u_value))
    return out


def _argmax_by_matrix_order(
    instance: PreferenceInstance, scores: dict[str, float]
) -> str:
    """Highest score wins; ties go to the smallest alternative index."""
    best_aid = None
    best = -math.inf
    for aid in sorted(scores, key=instance.matrix.index_of):
        s = scores[aid]
        if s > best:
            best = s
            best_aid = aid
    return best_aid


def select_from_vectors(
    strategy: Strategy,
    instance: PreferenceInstance,
    vectors: list[InfoVector],
) -> SelectionResult:
    """Score pre-computed information vectors and pick the winner.

    Pure arithmetic; exposed separately so recorded vectors can be re-scored
    (transparency views, regression tests).
    """
    if not vectors:
        raise InvalidInputError("no candidates to select from")
    if strategy.kind == "SM":
        scores = {v.alternative_id: ia_sum(v) for v in vectors}
        return SelectionResult(_argmax_by_matrix_order(instance, scores), scores)
    if strategy.kind not in PROPOSED_KINDS:
        raise InvalidInputError(f"{strategy.kind} does not score info vectors")
    metric = _METRICS[strategy.kind[0]]
    transform = _TRANSFORMS[strategy.kind[1]]
    table = {v.alternative_id: transform(v) for v in vectors}
    scores = {aid: metric(p) for aid, p in table.items()}
    return SelectionResult(
        _argmax_by_matrix_order(instance, scores), scores, table
    )


def select(
    strategy: Strategy,
    instance: PreferenceInstance,
    candidates: list[str],
    model: UtilityModel | None = None,
    rng_seed: int | None = None,
    jobs: int | None = None,
) -> SelectionResult:
    """Pick the next alternative to ask about.

    The proposed strategies derive scores from per-candidate info vectors;
    the P-family needs a currently fitted ``model``; RAND draws uniformly
    from a seeded generator.
    """
    if not candidates:
        raise InvalidInputError("no candidates to select from")

    if strategy.kind == "RAND":
        if rng_seed is None:
            raise InvalidInputError("RAND needs an rng_seed for reproducibility")
        ordered = sorted(candidates, key=instance.matrix.index_of)
        rng = np.random.default_rng(rng_seed)
        chosen = ordered[int(rng.integers(len(ordered)))]
        return SelectionResult(chosen, {})

    if strategy.needs_model:
        if model is None:
            raise InvalidInputError(f"{strategy.kind} requires a fitted model")
        metric = _METRICS[strategy.kind[1]]
        table = {}
        for aid in candidates:
            u = comprehensive_utility(model, instance.matrix.row(aid))
            phi = consistency_degree(model, u, instance.q)
            table[aid] = _softmax(tuple(phi), strategy.tau)
        scores = {aid: metric(p) for aid, p in table.items()}
        return SelectionResult(
            _argmax_by_matrix_order(instance, scores), scores, table
        )

    vectors = info_vectors(instance, candidates, jobs=jobs)
    return select_from_vectors(strategy, instance, vectors)
