"""Fitting sorting models from assignment examples.

Three LP formulations share one constraint core:

* max-margin fit — maximize ``alpha*eps - (1-alpha)*ICI/|examples|`` where
  ``eps`` is the category separation margin and ``ICI`` the total slack
  absorbing inconsistent judgments;
* complexity refinement — among solutions preserving the max-margin
  optimum, minimize the total slope change of the marginal utilities;
* minimum inconsistency — with the margin pinned to a small constant,
  minimize the total slack alone (a pure conflict measure).
"""

from __future__ import annotations

from dataclasses import dataclass

from prefsort.core import (
    AssignmentExample,
    CriterionScale,
    DecisionMatrix,
    UtilityModel,
    interpolation_weights,
    normalize,
)
from prefsort.errors import InternalError, InvalidInputError, SolverFailure
from prefsort.lp import LinearProgram, LpBuilder, LpSolution, solve

MIN_INCONSISTENCY_EPSILON = 1e-4  # pinned margin for the conflict measure
_ZERO_FLOOR = 1e-9  # solver dust below this reports as exactly zero


@dataclass(frozen=True)
class PreferenceInstance:
    """Everything a fit needs: data, scales, judgments and trade-off weight."""

    matrix: DecisionMatrix
    scales: tuple[CriterionScale, ...]
    examples: tuple[AssignmentExample, ...]
    q: int
    alpha: float
    monotone_mode: bool = False
    epsilon_floor: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "scales", tuple(self.scales))
        object.__setattr__(self, "examples", tuple(self.examples))
        if len(self.scales) != self.matrix.m:
            raise InvalidInputError("one scale per criterion required")
        if self.q < 2:
            raise InvalidInputError("need at least two categories")
        if not self.examples:
            raise InvalidInputError("at least one assignment example required")
        seen = set()
        for ex in self.examples:
            self.matrix.index_of(ex.alternative_id)
            if ex.alternative_id in seen:
                raise InvalidInputError(
                    f"duplicate example for {ex.alternative_id!r}"
                )
            seen.add(ex.alternative_id)
            if not 1 <= ex.category <= self.q:
                raise InvalidInputError(
                    f"category {ex.category} outside 1..{self.q}"
                )
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError("alpha must lie strictly inside (0, 1)")
        if self.epsilon_floor < 0:
            raise InvalidInputError("epsilon_floor must be >= 0")

    @property
    def reference_ids(self) -> tuple[str, ...]:
        return tuple(ex.alternative_id for ex in self.examples)

    def with_example(self, alternative_id: str, category: int) -> "PreferenceInstance":
        return PreferenceInstance(
            self.matrix,
            self.scales,
            self.examples + (AssignmentExample(alternative_id, category),),
            self.q,
            self.alpha,
            self.monotone_mode,
            self.epsilon_floor,
        )


@dataclass(frozen=True)
class InferenceOutcome:
    """A solved max-margin fit plus its diagnostics."""

    model: UtilityModel
    objective: float
    epsilon: float
    slacks: tuple[tuple[str, float, float], ...]  # (id, delta+, delta-)
    inconsistency: float

    @property
    def consistent(self) -> bool:
        return self.inconsistency <= _ZERO_FLOOR


def _u(j: int, l: int) -> str:
    return f"u_{j}_{l}"


def _utility_terms(
    instance: PreferenceInstance, alternative_id: str
) -> dict[str, float]:
    """LP coefficients expressing U(a) through breakpoint utility variables."""
    row = instance.matrix.row(alternative_id)
    terms: dict[str, float] = {}
    for j, scale in enumerate(instance.scales):
        for l, w in interpolation_weights(scale, float(row[j])):
            name = _u(j, l)
            terms[name] = terms.get(name, 0.0) + w
    return terms


def _core_builder(
    instance: PreferenceInstance, eps_lower: float, eps_upper: float
) -> LpBuilder:
    """Variables and constraints shared by every model in this module."""
    b = LpBuilder()
    m, q = instance.matrix.m, instance.q
    for j, scale in enumerate(instance.scales):
        for l in range(scale.point_count):
            b.add_var(_u(j, l), 0.0, 1.0)
    for h in range(1, q):
        b.add_var(f"b_{h}", 0.0, 2.0 * m)
    b.add_var("eps", eps_lower, eps_upper)
    for i in range(len(instance.examples)):
        b.add_var(f"dp_{i}")
        b.add_var(f"dm_{i}")

    for i, ex in enumerate(instance.examples):
        terms = _utility_terms(instance, ex.alternative_id)
        cat = ex.category
        if cat >= 2:  # lower side: b_{cat-1} - delta+ <= U
            lo = dict(terms)
            lo[f"b_{cat - 1}"] = lo.get(f"b_{cat - 1}", 0.0) - 1.0
            lo[f"dp_{i}"] = 1.0
            b.add_constraint(lo, ">=", 0.0)
        if cat <= q - 1:  # upper side: U <= b_cat - eps + delta-
            hi = dict(terms)
            hi[f"b_{cat}"] = hi.get(f"b_{cat}", 0.0) - 1.0
            hi["eps"] = hi.get("eps", 0.0) + 1.0
            hi[f"dm_{i}"] = -1.0
            b.add_constraint(hi, "<=", 0.0)
    for h in range(2, q):  # interior threshold spacing
        b.add_constraint({f"b_{h}": 1.0, f"b_{h - 1}": -1.0, "eps": -1.0}, ">=", 0.0)
    if instance.monotone_mode:
        for j, scale in enumerate(instance.scales):
            for l in range(scale.point_count - 1):
                b.add_constraint({_u(j, l + 1): 1.0, _u(j, l): -1.0}, ">=", 0.0)
    return b


def _max_margin_objective(instance: PreferenceInstance) -> dict[str, float]:
    penalty = (1.0 - instance.alpha) / len(instance.examples)
    coeffs = {"eps": instance.alpha}
    for i in range(len(instance.examples)):
        coeffs[f"dp_{i}"] = -penalty
        coeffs[f"dm_{i}"] = -penalty
    return coeffs


def build_max_margin(instance: PreferenceInstance) -> LinearProgram:
    """The max-margin fit as an explicit linear program."""
    m, q = instance.matrix.m, instance.q
    b = _core_builder(instance, instance.epsilon_floor, m / (q - 1))
    b.set_objective(_max_margin_objective(instance), "maximize")
    return b.build()


def _extract_model(
    instance: PreferenceInstance, sol: LpSolution
) -> tuple[UtilityModel, float, tuple[tuple[str, float, float], ...], float]:
    utilities = tuple(
        tuple(
            min(1.0, max(0.0, sol[_u(j, l)]))
            for l in range(scale.point_count)
        )
        for j, scale in enumerate(instance.scales)
    )
    eps = sol["eps"]
    interior = [sol[f"b_{h}"] for h in range(1, instance.q)]
    b0 = sum(min(us) for us in utilities)
    bq = sum(max(us) for us in utilities) + eps
    model = UtilityModel(
        instance.scales,
        utilities,
        (b0, *interior, bq),
        eps,
        instance.monotone_mode,
    )
    slacks = []
    ici = 0.0
    for i, ex in enumerate(instance.examples):
        dp = max(0.0, sol[f"dp_{i}"])
        dm = max(0.0, sol[f"dm_{i}"])
        slacks.append((ex.alternative_id, dp, dm))
        ici += dp + dm
    if ici < _ZERO_FLOOR:
        ici = 0.0
    return model, eps, tuple(slacks), ici


def fit(instance: PreferenceInstance) -> InferenceOutcome:
    """Solve the max-margin model and package the fitted sorting model."""
    sol = solve(build_max_margin(instance))
    if sol.status != "optimal":
        # feasible and bounded by construction, so this is a solver defect
        raise SolverFailure(f"max-margin fit ended with status {sol.status}")
    model, eps, slacks, ici = _extract_model(instance, sol)
    return InferenceOutcome(model, sol.objective_value, eps, slacks, ici)


def refine_complexity(
    instance: PreferenceInstance, outcome: InferenceOutcome
) -> UtilityModel:
    """Minimize total marginal-utility slope change while preserving the fit.

    The refined model keeps the max-margin objective value (enforced as an
    equality) and the margin itself, so every example keeps its slack
    budget; among those solutions the piecewise-linear utilities become as
    straight as the constraints allow.
    """
    gammas = [
        (j, l)
        for j, scale in enumerate(instance.scales)
        for l in range(1, scale.point_count - 1)
    ]
    if not gammas:
        return outcome.model

    # pinning eps keeps (eps, ICI) at the fitted optimum, not just their
    # objective combination; slack budgets are then conserved exactly
    b = _core_builder(instance, outcome.epsilon, outcome.epsilon)
    for j, l in gammas:
        b.add_var(f"g_{j}_{l}")
    for j, l in gammas:
        bps = instance.scales[j].breakpoints
        left = 1.0 / (bps[l] - bps[l - 1])
        right = 1.0 / (bps[l + 1] - bps[l])
        diff = {
            _u(j, l + 1): right,
            _u(j, l): -right - left,
            _u(j, l - 1): left,
        }
        b.add_constraint({**diff, f"g_{j}_{l}": -1.0}, "<=", 0.0)
        b.add_constraint(
            {k: -v for k, v in diff.items()} | {f"g_{j}_{l}": -1.0}, "<=", 0.0
        )
    b.add_constraint(_max_margin_objective(instance), "=", outcome.objective)
    b.set_objective({f"g_{j}_{l}": 1.0 for j, l in gammas}, "minimize")

    sol = solve(b.build())
    if sol.status != "optimal":
        raise InternalError(
            "complexity refinement infeasible although the max-margin "
            f"optimum satisfies it (status {sol.status}, "
            f"J*={outcome.objective!r}, eps={outcome.epsilon!r})"
        )
    model, _, _, _ = _extract_model(instance, sol)
    return model


def fit_refined(instance: PreferenceInstance) -> tuple[InferenceOutcome, UtilityModel]:
    """Max-margin fit followed by complexity refinement."""
    outcome = fit(instance)
    return outcome, refine_complexity(instance, outcome)


def min_inconsistency(instance: PreferenceInstance) -> float:
    """Smallest total slack with the margin pinned to a tiny constant.

    Zero exactly when the examples are separable by some model in the
    class; values below solver precision are reported as zero.
    """
    b = _core_builder(
        instance, MIN_INCONSISTENCY_EPSILON, MIN_INCONSISTENCY_EPSILON
    )
    coeffs = {}
    for i in range(len(instance.examples)):
        coeffs[f"dp_{i}"] = 1.0
        coeffs[f"dm_{i}"] = 1.0
    b.set_objective(coeffs, "minimize")
    sol = solve(b.build())
    if sol.status != "optimal":
        raise SolverFailure(f"inconsistency measure ended with {sol.status}")
    value = sol.objective_value
    return 0.0 if value < _ZERO_FLOOR else value


def outcome_to_json(
    outcome: InferenceOutcome, criterion_names: tuple[str, ...] | None = None
) -> dict:
    """Documented JSON shape for a fitted model (see README)."""
    model = outcome.model
    names = criterion_names or tuple(
        f"criterion_{j + 1}" for j in range(model.m)
    )
    norm = normalize(model)
    return {
        "criteria": [
            {
                "name": names[j],
                "breakpoints": list(model.scales[j].breakpoints),
                "utilities": list(model.breakpoint_utilities[j]),
            }
            for j in range(model.m)
        ],
        "thresholds": list(model.thresholds),
        "epsilon": model.epsilon,
        "monotone": model.monotone_mode,
        "objective": outcome.objective,
        "inconsistency": outcome.inconsistency,
        "slacks": [
            {"id": aid, "plus": dp, "minus": dm}
            for aid, dp, dm in outcome.slacks
        ],
        "normalized": {
            "utilities": [list(us) for us in norm.normalized_utilities],
            "thresholds": list(norm.normalized_thresholds),
            "epsilon": norm.epsilon_s,
        },
    }
