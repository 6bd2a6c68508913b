"""Minimal linear-programming layer: bounded variables, linear constraints,
linear objective, deterministic vertex-exact solving."""

from prefsort.lp.program import LinearProgram, LpBuilder, LpSolution, to_lp_text
from prefsort.lp.solver import available_backends, default_backend, solve

__all__ = [
    "LinearProgram",
    "LpBuilder",
    "LpSolution",
    "available_backends",
    "default_backend",
    "solve",
    "to_lp_text",
]
