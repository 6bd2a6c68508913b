"""Linear program description and solution types."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from prefsort.errors import InvalidInputError

RELATIONS = ("<=", ">=", "=")
SENSES = ("maximize", "minimize")


@dataclass(frozen=True)
class LinearProgram:
    """An immutable LP: bounded variables, linear constraints, one objective.

    ``variables`` is a tuple of ``(name, lower, upper)``; infinite bounds are
    allowed.  Each constraint is ``(coefficients, relation, rhs)`` with
    ``relation`` one of ``<=``, ``>=``, ``=``.  The objective is
    ``(coefficients, sense)``.
    """

    variables: tuple[tuple[str, float, float], ...]
    constraints: tuple[tuple[dict[str, float], str, float], ...]
    objective: tuple[dict[str, float], str]

    def __post_init__(self):
        names = [v[0] for v in self.variables]
        if len(set(names)) != len(names):
            raise InvalidInputError("variable names must be unique")
        declared = set(names)
        for name, lo, hi in self.variables:
            if math.isnan(lo) or math.isnan(hi):
                raise InvalidInputError(f"NaN bound on {name!r}")
            if lo > hi:
                raise InvalidInputError(f"bounds crossed on {name!r}: {lo} > {hi}")
        for k, (coeffs, rel, rhs) in enumerate(self.constraints):
            if rel not in RELATIONS:
                raise InvalidInputError(f"constraint {k}: unknown relation {rel!r}")
            if not math.isfinite(rhs):
                raise InvalidInputError(f"constraint {k}: non-finite rhs")
            for name, c in coeffs.items():
                if name not in declared:
                    raise InvalidInputError(
                        f"constraint {k} references undeclared variable {name!r}"
                    )
                if not math.isfinite(c):
                    raise InvalidInputError(f"constraint {k}: non-finite coefficient")
        coeffs, sense = self.objective
        if sense not in SENSES:
            raise InvalidInputError(f"unknown objective sense {sense!r}")
        for name, c in coeffs.items():
            if name not in declared:
                raise InvalidInputError(f"objective references undeclared {name!r}")
            if not math.isfinite(c):
                raise InvalidInputError("objective has a non-finite coefficient")

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(v[0] for v in self.variables)


@dataclass(frozen=True)
class LpSolution:
    """Solver verdict: status, objective value and a full assignment.

    When ``status`` is ``optimal`` the assignment satisfies every constraint
    within 1e-8 and every bound within 1e-9 (verified before returning).
    """

    status: str  # optimal | infeasible | unbounded
    objective_value: float
    assignment: dict[str, float]

    def __getitem__(self, name: str) -> float:
        return self.assignment[name]


class LpBuilder:
    """Incremental construction helper for LinearProgram values."""

    def __init__(self):
        self._vars: list[tuple[str, float, float]] = []
        self._seen: set[str] = set()
        self._cons: list[tuple[dict[str, float], str, float]] = []
        self._obj: tuple[dict[str, float], str] = ({}, "minimize")

    def add_var(self, name: str, lower: float = 0.0, upper: float = math.inf) -> str:
        if name in self._seen:
            raise InvalidInputError(f"duplicate variable {name!r}")
        self._seen.add(name)
        self._vars.append((name, float(lower), float(upper)))
        return name

    def add_constraint(
        self, coeffs: Mapping[str, float], relation: str, rhs: float
    ) -> None:
        self._cons.append((dict(coeffs), relation, float(rhs)))

    def set_objective(self, coeffs: Mapping[str, float], sense: str) -> None:
        self._obj = (dict(coeffs), sense)

    def build(self) -> LinearProgram:
        return LinearProgram(tuple(self._vars), tuple(self._cons), self._obj)


def _term(c: float, name: str, first: bool) -> str:
    sign = "-" if c < 0 else ("" if first else "+")
    mag = abs(c)
    coef = "" if mag == 1 else f"{mag:.12g} "
    return f"{sign} {coef}{name} ".lstrip() if not first else f"{sign}{coef}{name} "


def _expr(coeffs: Mapping[str, float], order: Iterable[str]) -> str:
    parts = []
    for name in order:
        c = coeffs.get(name, 0.0)
        if c == 0:
            continue
        parts.append(_term(c, name, first=not parts))
    return "".join(parts).strip() or "0 " + next(iter(order))


def to_lp_text(lp: LinearProgram, name: str = "prefsort") -> str:
    """Render the program in LP text format for external cross-checking."""
    order = lp.variable_names
    coeffs, sense = lp.objective
    lines = [f"\\ {name}", "Maximize" if sense == "maximize" else "Minimize",
             f" obj: {_expr(coeffs, order)}", "Subject To"]
    for k, (cs, rel, rhs) in enumerate(lp.constraints):
        op = {"<=": "<=", ">=": ">=", "=": "="}[rel]
        lines.append(f" c{k}: {_expr(cs, order)} {op} {rhs:.12g}")
    lines.append("Bounds")
    for vname, lo, hi in lp.variables:
        lo_s = f"{lo:.12g}" if math.isfinite(lo) else "-inf"
        hi_s = f"{hi:.12g}" if math.isfinite(hi) else "+inf"
        lines.append(f" {lo_s} <= {vname} <= {hi_s}")
    lines.append("End")
    return "\n".join(lines) + "\n"
