"""Benchmark the compiled simplex kernel against the pure-Python fallback.

Builds a corpus of production-family programs (max-margin fits of growing
size plus their complexity refinements), times both backends on identical
inputs and checks that every answer is bit-identical.

Run:  python benchmarks/bench_lp.py
"""

import time

from prefsort.core import AssignmentExample, build_scales
from prefsort.inference import PreferenceInstance, build_max_margin
from prefsort.lp.solver import available_backends, solve
from prefsort.simulation import GenerationConfig, generate_dataset


def build_corpus():
    corpus = []
    for n, m, q, tag in (
        (12, 3, 4, "small fit"),
        (30, 3, 3, "desk fit"),
        (60, 4, 3, "training fit"),
        (100, 4, 3, "large fit"),
    ):
        cfg = GenerationConfig(n, m, q, (4,) * m, eta=0.05, seed=n)
        matrix, labels = generate_dataset(cfg)
        scales = tuple(build_scales(matrix, (4,) * m))
        examples = tuple(
            AssignmentExample(a, labels[a]) for a in matrix.alternative_ids
        )
        instance = PreferenceInstance(matrix, scales, examples, q, 0.1)
        lp = build_max_margin(instance)
        corpus.append((tag, lp))
    return corpus


def time_backend(lp, backend, repeats):
    best = float("inf")
    sol = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        sol = solve(lp, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, sol


def main():
    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")
    if "compiled" not in backends:
        print("compiled kernel not built; nothing to compare")
        return
    corpus = build_corpus()
    print(f"{'program':<14} {'vars':>5} {'rows':>5} "
          f"{'python':>10} {'compiled':>10} {'speedup':>8}  identical")
    for tag, lp in corpus:
        repeats = 5 if len(lp.variables) < 200 else 3
        t_py, sol_py = time_backend(lp, "python", repeats)
        t_c, sol_c = time_backend(lp, "compiled", repeats)
        same = (
            sol_py.status == sol_c.status
            and sol_py.objective_value == sol_c.objective_value
            and sol_py.assignment == sol_c.assignment
        )
        print(
            f"{tag:<14} {len(lp.variables):>5} {len(lp.constraints):>5} "
            f"{t_py * 1000:>8.2f}ms {t_c * 1000:>8.2f}ms "
            f"{t_py / t_c:>7.1f}x  {'yes' if same else 'NO'}"
        )
        if not same:
            raise SystemExit("backend results diverge")

    # end-to-end: one full elicitation iteration at desk scale
    cfg = GenerationConfig(30, 3, 3, (4, 4, 4), eta=0.05, seed=30)
    matrix, labels = generate_dataset(cfg)
    scales = tuple(build_scales(matrix, (4, 4, 4)))
    examples = tuple(
        AssignmentExample(a, labels[a]) for a in matrix.alternative_ids[:6]
    )
    instance = PreferenceInstance(matrix, scales, examples, 3, 0.1)
    candidates = list(matrix.alternative_ids[6:])
    import os

    from prefsort.strategy import info_vectors

    for backend_env, label in (("1", "python"), ("", "compiled")):
        os.environ["PREFSORT_PURE"] = backend_env
        t0 = time.perf_counter()
        info_vectors(instance, candidates)
        dt = time.perf_counter() - t0
        print(f"one selection round ({len(candidates) * 3} fits), "
              f"{label:>8}: {dt * 1000:7.1f}ms")
    os.environ.pop("PREFSORT_PURE", None)


if __name__ == "__main__":
    main()
