"""Standard-form conversion, kernel dispatch and solution verification.

The compiled kernel (``prefsort.lp._kernel``) is used when importable and
``PREFSORT_PURE`` is not set; otherwise the pure-Python twin takes over.
Both produce bit-identical results.
"""

from __future__ import annotations

import math
import os

import numpy as np

from prefsort.errors import InvalidInputError, SolverFailure
from prefsort.lp import _kernel_py
from prefsort.lp.program import LinearProgram, LpSolution

try:  # pragma: no cover - depends on the build environment
    from prefsort.lp import _kernel as _kernel_c
except ImportError:  # pragma: no cover
    _kernel_c = None

RESIDUAL_TOL = 1e-8
BOUND_TOL = 1e-9

_KERNELS = {"python": _kernel_py.solve_standard}
if _kernel_c is not None:
    _KERNELS["compiled"] = _kernel_c.solve_standard


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_KERNELS))


def default_backend() -> str:
    if "compiled" in _KERNELS and not os.environ.get("PREFSORT_PURE"):
        return "compiled"
    return "python"


def solve(lp: LinearProgram, backend: str | None = None) -> LpSolution:
    """Solve the program; deterministic, vertex-exact on small dense LPs.

    Raises :class:`SolverFailure` instead of ever returning an unverified
    "optimal" answer.
    """
    name = backend or default_backend()
    try:
        kernel = _KERNELS[name]
    except KeyError:
        raise InvalidInputError(f"unknown LP backend {name!r}") from None

    nv = len(lp.variables)
    col_of = {v[0]: j for j, v in enumerate(lp.variables)}

    # Columns may be reflected (upper-bounded free-below variables) or split
    # (doubly free variables) so the kernel only ever sees finite lower bounds.
    lower = np.zeros(nv)
    span = np.zeros(nv)      # upper - lower in kernel space (may be inf)
    sign = np.ones(nv)       # +1 plain, -1 reflected
    split_cols: list[int] = []  # variables needing an extra negative part
    for j, (_, lo, hi) in enumerate(lp.variables):
        if math.isfinite(lo):
            lower[j] = lo
            span[j] = hi - lo
        elif math.isfinite(hi):
            sign[j] = -1.0
            lower[j] = -hi  # x = -(y + lower) with y >= 0
            span[j] = math.inf
        else:
            lower[j] = 0.0
            span[j] = math.inf
            split_cols.append(j)

    n_extra = len(split_cols)
    nrows = len(lp.constraints)
    n_slack = sum(1 for _, rel, _ in lp.constraints if rel != "=")
    n_total = nv + n_extra + n_slack

    A = np.zeros((nrows, n_total))
    b = np.zeros(nrows)
    extra_at = {j: nv + k for k, j in enumerate(split_cols)}
    slack_col = nv + n_extra
    for i, (coeffs, rel, rhs) in enumerate(lp.constraints):
        shift = 0.0
        for vname, cval in coeffs.items():
            j = col_of[vname]
            A[i, j] = cval * sign[j]
            if j in extra_at:
                A[i, extra_at[j]] = -cval
            shift += cval * sign[j] * lower[j]
        b[i] = rhs - shift
        if rel == "<=":
            A[i, slack_col] = 1.0
            slack_col += 1
        elif rel == ">=":
            A[i, slack_col] = -1.0
            slack_col += 1

    obj_coeffs, sense = lp.objective
    flip = -1.0 if sense == "maximize" else 1.0
    c = np.zeros(n_total)
    const = 0.0
    for vname, cval in obj_coeffs.items():
        j = col_of[vname]
        c[j] = flip * cval * sign[j]
        if j in extra_at:
            c[extra_at[j]] = -flip * cval
        const += cval * sign[j] * lower[j]

    upper = np.full(n_total, math.inf)
    upper[:nv] = span

    max_iter = 20000 + 200 * (nrows + n_total)
    status, y, _ = kernel(A, b, c, upper, max_iter, _kernel_py.PERTURBATION)
    if status in (_kernel_py.STATUS_NEEDS_EXACT, _kernel_py.STATUS_INFEASIBLE):
        # equality-constrained programs may be feasible only on a face that
        # the anti-degeneracy nudge displaces, and a perturbed-optimal basis
        # may not carry over to the true rhs; both cases resolve exactly
        status, y, _ = kernel(A, b, c, upper, max_iter, 0.0)

    if status == _kernel_py.STATUS_INFEASIBLE:
        return LpSolution("infeasible", math.nan, {})
    if status == _kernel_py.STATUS_UNBOUNDED:
        return LpSolution("unbounded", math.nan, {})
    if status != _kernel_py.STATUS_OPTIMAL:
        raise SolverFailure("simplex did not converge (iteration cap reached)")

    assignment: dict[str, float] = {}
    for j, (vname, _, _) in enumerate(lp.variables):
        v = sign[j] * (y[j] + lower[j])
        if j in extra_at:
            v -= y[extra_at[j]]
        assignment[vname] = float(v)

    _verify(lp, assignment)

    objective = 0.0
    for vname, _, _ in lp.variables:
        cval = obj_coeffs.get(vname, 0.0)
        if cval != 0.0:
            objective += cval * assignment[vname]
    return LpSolution("optimal", float(objective), assignment)


def _verify(lp: LinearProgram, x: dict[str, float]) -> None:
    """Reject any claimed optimum violating constraints or bounds."""
    for vname, lo, hi in lp.variables:
        v = x[vname]
        if v < lo - BOUND_TOL or v > hi + BOUND_TOL:
            raise SolverFailure(
                f"bound violated: {vname}={v!r} outside [{lo}, {hi}]"
            )
    for k, (coeffs, rel, rhs) in enumerate(lp.constraints):
        acc = 0.0
        for vname, cval in coeffs.items():
            acc += cval * x[vname]
        resid = acc - rhs
        bad = (
            (rel == "<=" and resid > RESIDUAL_TOL)
            or (rel == ">=" and resid < -RESIDUAL_TOL)
            or (rel == "=" and abs(resid) > RESIDUAL_TOL)
        )
        if bad:
            raise SolverFailure(f"constraint {k} violated by {resid:.3e}")
