"""Threshold-based multi-criteria sorting model.

A sorting model scores each alternative with an additive utility
``U(a) = sum_j u_j(x_aj)`` built from per-criterion piecewise-linear
marginal utilities, then places it in the category whose threshold
interval ``[b_{h-1}, b_h)`` contains ``U``.  Marginal utilities are
defined by their values at equally spaced breakpoints and are allowed to
be non-monotonic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from prefsort.errors import DegenerateModelError, InvalidInputError

GAP_RTOL = 1e-9  # relative tolerance for "equally spaced" breakpoints


@dataclass(frozen=True)
class DecisionMatrix:
    """The fixed universe of alternatives being sorted.

    ``performances[i, j]`` is the level of alternative ``i`` on criterion
    ``j`` in criterion-native units.
    """

    alternative_ids: tuple[str, ...]
    performances: np.ndarray
    criterion_names: tuple[str, ...]

    def __post_init__(self):
        ids = tuple(str(a) for a in self.alternative_ids)
        names = tuple(str(c) for c in self.criterion_names)
        perf = np.asarray(self.performances, dtype=float)
        if perf.ndim != 2:
            raise InvalidInputError("performances must be a 2-D grid")
        n, m = perf.shape
        if n < 1 or m < 1:
            raise InvalidInputError("need at least one alternative and one criterion")
        if len(ids) != n:
            raise InvalidInputError(f"{len(ids)} ids for {n} performance rows")
        if len(names) != m:
            raise InvalidInputError(f"{len(names)} criterion names for {m} columns")
        if len(set(ids)) != n:
            raise InvalidInputError("alternative ids must be unique")
        if not np.all(np.isfinite(perf)):
            raise InvalidInputError("performance levels must be finite")
        perf = perf.copy()
        perf.flags.writeable = False
        object.__setattr__(self, "alternative_ids", ids)
        object.__setattr__(self, "criterion_names", names)
        object.__setattr__(self, "performances", perf)

    @property
    def n(self) -> int:
        return self.performances.shape[0]

    @property
    def m(self) -> int:
        return self.performances.shape[1]

    @cached_property
    def _index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.alternative_ids)}

    def index_of(self, alternative_id: str) -> int:
        try:
            return self._index[alternative_id]
        except KeyError:
            raise InvalidInputError(f"unknown alternative {alternative_id!r}") from None

    def row(self, alternative_id: str) -> np.ndarray:
        return self.performances[self.index_of(alternative_id)]


@dataclass(frozen=True)
class CriterionScale:
    """Equally spaced breakpoints spanning one criterion's observed range.

    A constant column degenerates to a single breakpoint.
    """

    breakpoints: tuple[float, ...]

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        if len(bps) < 1:
            raise InvalidInputError("a scale needs at least one breakpoint")
        if any(not np.isfinite(b) for b in bps):
            raise InvalidInputError("breakpoints must be finite")
        if len(bps) > 1:
            span = bps[-1] - bps[0]
            if span <= 0:
                raise InvalidInputError("breakpoints must be strictly increasing")
            gap = span / (len(bps) - 1)
            for lo, hi in zip(bps, bps[1:]):
                if hi <= lo:
                    raise InvalidInputError("breakpoints must be strictly increasing")
                if abs((hi - lo) - gap) > GAP_RTOL * max(1.0, abs(gap)):
                    raise InvalidInputError("breakpoints must be equally spaced")
        object.__setattr__(self, "breakpoints", bps)

    @property
    def subinterval_count(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def point_count(self) -> int:
        return len(self.breakpoints)


@dataclass(frozen=True)
class UtilityModel:
    """A fitted sorting model: marginal utilities, thresholds and margin.

    ``thresholds`` carries the full vector ``b_0..b_q``; only the interior
    entries ``b_1..b_{q-1}`` act in category assignment, the endpoints are
    display values.
    """

    scales: tuple[CriterionScale, ...]
    breakpoint_utilities: tuple[tuple[float, ...], ...]
    thresholds: tuple[float, ...]
    epsilon: float
    monotone_mode: bool = False

    def __post_init__(self):
        scales = tuple(self.scales)
        utils = tuple(tuple(float(u) for u in us) for us in self.breakpoint_utilities)
        thr = tuple(float(b) for b in self.thresholds)
        if len(scales) != len(utils):
            raise InvalidInputError("one utility vector per scale required")
        for sc, us in zip(scales, utils):
            if len(us) != sc.point_count:
                raise InvalidInputError("one utility per breakpoint required")
            if any(u < -1e-9 or u > 1 + 1e-9 for u in us):
                raise InvalidInputError("breakpoint utilities must lie in [0, 1]")
            if self.monotone_mode and any(b < a - 1e-9 for a, b in zip(us, us[1:])):
                raise InvalidInputError("monotone mode requires non-decreasing utilities")
        if len(thr) < 2:
            raise InvalidInputError("need thresholds b_0..b_q with q >= 1")
        if self.epsilon < 0:
            raise InvalidInputError("epsilon must be non-negative")
        q = len(thr) - 1
        for h in range(2, q):  # interior spacing only: b_h - b_{h-1} >= eps
            if thr[h] - thr[h - 1] < self.epsilon - 1e-9:
                raise InvalidInputError(
                    f"threshold spacing b_{h}-b_{h-1} below the margin"
                )
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "breakpoint_utilities", utils)
        object.__setattr__(self, "thresholds", thr)
        object.__setattr__(self, "epsilon", float(self.epsilon))

    @property
    def m(self) -> int:
        return len(self.scales)

    @property
    def q(self) -> int:
        return len(self.thresholds) - 1


@dataclass(frozen=True)
class NormalizedModel:
    """A model mapped to the standard form: per-criterion minimum utility 0,
    criterion maxima summing to 1, thresholds rescaled accordingly."""

    normalized_utilities: tuple[tuple[float, ...], ...]
    normalized_thresholds: tuple[float, ...]
    epsilon_s: float


@dataclass(frozen=True)
class AssignmentExample:
    """One decision-maker judgment: this alternative belongs to that category."""

    alternative_id: str
    category: int

    def __post_init__(self):
        object.__setattr__(self, "alternative_id", str(self.alternative_id))
        object.__setattr__(self, "category", int(self.category))
        if self.category < 1:
            raise InvalidInputError("categories are numbered from 1")


def build_scales(
    matrix: DecisionMatrix, subinterval_counts: Sequence[int]
) -> list[CriterionScale]:
    """Derive equally spaced breakpoints from the observed column ranges.

    ``subinterval_counts[j]`` asks for ``s_j`` subintervals, hence
    ``s_j + 1`` breakpoints; a constant column collapses to a single one.
    """
    counts = [int(s) for s in subinterval_counts]
    if len(counts) != matrix.m:
        raise InvalidInputError("one subinterval count per criterion required")
    if any(s < 1 for s in counts):
        raise InvalidInputError("subinterval counts must be >= 1")
    scales = []
    for j, s in enumerate(counts):
        col = matrix.performances[:, j]
        lo, hi = float(col.min()), float(col.max())
        if hi == lo:
            scales.append(CriterionScale((lo,)))
            continue
        pts = [lo + (hi - lo) * l / s for l in range(s + 1)]
        pts[0], pts[-1] = lo, hi  # exact endpoints
        scales.append(CriterionScale(tuple(pts)))
    return scales


def interpolation_weights(
    scale: CriterionScale, x: float
) -> list[tuple[int, float]]:
    """Breakpoint weights representing ``x`` on this scale.

    The returned pairs ``(l, w)`` satisfy ``u(x) = sum w * u[l]`` for any
    utility vector; out-of-range ``x`` clamps to the nearest endpoint.
    """
    bps = scale.breakpoints
    if len(bps) == 1 or x <= bps[0]:
        return [(0, 1.0)]
    if x >= bps[-1]:
        return [(len(bps) - 1, 1.0)]
    gap = (bps[-1] - bps[0]) / (len(bps) - 1)
    l = int((x - bps[0]) / gap)
    l = min(max(l, 0), len(bps) - 2)
    # realign if floating-point division landed in the wrong cell
    while l > 0 and x < bps[l]:
        l -= 1
    while l < len(bps) - 2 and x >= bps[l + 1]:
        l += 1
    if x == bps[l]:
        return [(l, 1.0)]
    t = (x - bps[l]) / (bps[l + 1] - bps[l])
    return [(l, 1.0 - t), (l + 1, t)]


def marginal_utility(
    scale: CriterionScale, utilities: Sequence[float], x: float
) -> float:
    """Piecewise-linear interpolation of the breakpoint utilities at ``x``.

    Values at breakpoints are returned exactly; ``x`` outside the scale is
    clamped to the nearest endpoint.
    """
    if len(utilities) != scale.point_count:
        raise InvalidInputError("one utility per breakpoint required")
    total = 0.0
    for l, w in interpolation_weights(scale, float(x)):
        if w == 1.0:
            return float(utilities[l])
        total += w * float(utilities[l])
    return total


def comprehensive_utility(model: UtilityModel, performance_row: Sequence[float]) -> float:
    """Sum of the per-criterion marginal utilities for one alternative."""
    row = list(performance_row)
    if len(row) != model.m:
        raise InvalidInputError(f"expected {model.m} performance levels, got {len(row)}")
    return sum(
        marginal_utility(sc, us, x)
        for sc, us, x in zip(model.scales, model.breakpoint_utilities, row)
    )


BOUNDARY_GRACE = 1e-9  # absorbs re-evaluation noise at exactly-binding thresholds


def assign_category(model: UtilityModel, u_value: float) -> int:
    """Category ``h`` with ``b_{h-1} <= U < b_h`` (half-open intervals).

    ``U`` below ``b_1`` maps to category 1, ``U >= b_{q-1}`` to category q.
    Fitted models may place a reference utility exactly on its lower
    threshold; re-evaluating it can land one ulp below, so the comparison
    carries a tiny grace toward the upper category.
    """
    q = model.q
    h = 1
    for b in model.thresholds[1:q]:  # interior thresholds b_1..b_{q-1}
        if u_value >= b - BOUNDARY_GRACE:
            h += 1
    return h


def sort_alternatives(
    model: UtilityModel, matrix: DecisionMatrix
) -> dict[str, int]:
    """Assign every alternative of the matrix with the fitted model."""
    return {
        aid: assign_category(model, comprehensive_utility(model, matrix.performances[i]))
        for i, aid in enumerate(matrix.alternative_ids)
    }


def normalize(model: UtilityModel) -> NormalizedModel:
    """Map the model to the standard form.

    Per criterion the minimum breakpoint utility becomes 0 and the maxima
    sum to 1 across criteria; thresholds go through the same affine map, so
    category assignment is unchanged.  The endpoint thresholds follow the
    display convention: ``b^S_0 = 0`` and ``b^S_q = 1 + eps^S``.
    """
    mins = [min(us) for us in model.breakpoint_utilities]
    maxs = [max(us) for us in model.breakpoint_utilities]
    denom = sum(mx - mn for mn, mx in zip(mins, maxs))
    if denom <= 0:
        raise DegenerateModelError("all criteria are flat; nothing to normalize")
    norm_utils = tuple(
        tuple((u - mn) / denom for u in us)
        for us, mn in zip(model.breakpoint_utilities, mins)
    )
    shift = sum(mins)
    eps_s = model.epsilon / denom
    q = model.q
    interior = [(b - shift) / denom for b in model.thresholds[1:q]]
    norm_thr = (0.0, *interior, 1.0 + eps_s)
    return NormalizedModel(norm_utils, norm_thr, eps_s)
