"""Artificial data generation and the batch experiment harness.

Datasets are drawn from a random ground-truth sorting model, optionally
corrupted with label noise; experiments replay the elicitation loop with a
simulated decision maker who answers straight from the (possibly noisy)
training labels, and score strategies by test accuracy over iterations
(question budget) or by cost saving (target accuracy).
"""

from __future__ import annotations

import csv
import io as _io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from prefsort.core import (
    AssignmentExample,
    DecisionMatrix,
    UtilityModel,
    assign_category,
    build_scales,
    comprehensive_utility,
)
from prefsort.errors import InvalidInputError
from prefsort.inference import (
    PreferenceInstance,
    fit,
    min_inconsistency,
    refine_complexity,
)
from prefsort.strategy import Strategy, select

CSV_HEADER = (
    "experiment,param_point,strategy,dataset,run,iteration,metric,value,seed,wall_ms"
)


def round_half_up(x: float) -> int:
    """Bracket operators in the sizing rules read as round-half-up."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class GenerationConfig:
    n: int
    m: int
    q: int
    subinterval_counts: tuple[int, ...]
    eta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "subinterval_counts", tuple(int(s) for s in self.subinterval_counts)
        )
        if self.n < self.q:
            raise InvalidInputError("need at least one alternative per category")
        if self.q < 2:
            raise InvalidInputError("need at least two categories")
        if len(self.subinterval_counts) != self.m:
            raise InvalidInputError("one subinterval count per criterion")
        if not 0.0 <= self.eta <= 1.0:
            raise InvalidInputError("noise proportion must lie in [0, 1]")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment cell grid point (defaults follow the reference setup)."""

    generation: GenerationConfig
    strategies: tuple[str, ...]
    r: float = 0.6
    lr: float = 0.2
    T: int = 30
    alpha: float = 0.1
    datasets: int = 10
    runs: int = 10
    seed: int = 0
    monotone_mode: bool = False
    target_accuracy: float | None = None  # explicit target (criterion II);
    # when unset, the mean accuracy of ten full-training fits is used

    def __post_init__(self):
        object.__setattr__(self, "strategies", tuple(self.strategies))
        if not 0.0 < self.r < 1.0:
            raise InvalidInputError("train fraction r must lie in (0, 1)")
        if not 0.0 < self.lr < 1.0:
            raise InvalidInputError("initial-label fraction lr must lie in (0, 1)")
        if self.T < 0:
            raise InvalidInputError("question budget must be >= 0")
        for s in self.strategies:
            Strategy(s)  # validates the name


@dataclass(frozen=True)
class RunRecord:
    strategy: str
    dataset: int
    run: int
    accuracies: tuple[float, ...] | None  # budget mode: Acc^0..Acc^T
    cs: float | None  # target mode: cost saving rate
    aq: int  # answered questions
    wall_ms: float


def generate_dataset(cfg: GenerationConfig) -> tuple[DecisionMatrix, dict[str, int]]:
    """Draw a dataset from a random sorting model, then flip some labels.

    Performances are uniform on [0, 100], breakpoint utilities uniform on
    [0, 1]; thresholds sit at the h/q quantile midpoints of the simulated
    utilities so categories come out roughly balanced; finally
    round(n*eta) alternatives get relabelled to a different category.
    The noise draw happens last, so the same seed with a different eta
    yields the identical underlying dataset.
    """
    rng = np.random.default_rng(cfg.seed)
    perf = rng.uniform(0.0, 100.0, size=(cfg.n, cfg.m))
    ids = tuple(f"a{i}" for i in range(1, cfg.n + 1))
    matrix = DecisionMatrix(ids, perf, tuple(f"g{j}" for j in range(1, cfg.m + 1)))
    scales = build_scales(matrix, cfg.subinterval_counts)
    utilities = tuple(
        tuple(float(u) for u in rng.uniform(0.0, 1.0, size=sc.point_count))
        for sc in scales
    )
    u_values = []
    for i in range(cfg.n):
        total = 0.0
        for j, sc in enumerate(scales):
            from prefsort.core import marginal_utility

            total += marginal_utility(sc, utilities[j], float(perf[i, j]))
        u_values.append(total)
    order = np.sort(np.asarray(u_values))
    interior = []
    for h in range(1, cfg.q):
        k = round_half_up(cfg.n * h / cfg.q)
        k = min(max(k, 1), cfg.n - 1)
        interior.append((order[k - 1] + order[k]) / 2.0)
    b0 = sum(min(us) for us in utilities)
    bq = sum(max(us) for us in utilities)
    model = UtilityModel(tuple(scales), utilities, (b0, *interior, bq), 0.0)
    labels = {
        ids[i]: assign_category(model, u_values[i]) for i in range(cfg.n)
    }
    flips = round_half_up(cfg.n * cfg.eta)
    if flips > 0:
        chosen = rng.choice(cfg.n, size=flips, replace=False)
        for i in chosen:
            aid = ids[int(i)]
            others = [c for c in range(1, cfg.q + 1) if c != labels[aid]]
            labels[aid] = others[int(rng.integers(len(others)))]
    return matrix, labels


def stratified_split(
    matrix: DecisionMatrix,
    labels: dict[str, int],
    r: float,
    rng: np.random.Generator,
) -> tuple[list[str], list[str]]:
    """Per-category train/test split; each category's train share is within
    one alternative of ``r``."""
    by_cat: dict[int, list[str]] = {}
    for aid in matrix.alternative_ids:
        by_cat.setdefault(labels[aid], []).append(aid)
    train: set[str] = set()
    for cat in sorted(by_cat):
        members = by_cat[cat]
        k = round_half_up(len(members) * r)
        picked = rng.permutation(len(members))[:k]
        train.update(members[int(i)] for i in picked)
    train_ids = [a for a in matrix.alternative_ids if a in train]
    test_ids = [a for a in matrix.alternative_ids if a not in train]
    return train_ids, test_ids


def _cell_rng(*key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(key))


def _accuracy(
    model: UtilityModel, matrix: DecisionMatrix, ids: list[str], labels: dict[str, int]
) -> float:
    if not ids:
        return 1.0
    hits = 0
    for aid in ids:
        u = comprehensive_utility(model, matrix.row(aid))
        if assign_category(model, u) == labels[aid]:
            hits += 1
    return hits / len(ids)


def _prepare_run(
    cfg: ExperimentConfig, dataset_idx: int, run_idx: int
) -> tuple[DecisionMatrix, dict[str, int], tuple, list[str], list[str], list[str]]:
    """Dataset, split and initial reference draw for one (dataset, run) cell.

    Strategy never enters the derivation, so all strategies compare on the
    identical dataset, split and initial examples.
    """
    gen = GenerationConfig(
        cfg.generation.n,
        cfg.generation.m,
        cfg.generation.q,
        cfg.generation.subinterval_counts,
        cfg.generation.eta,
        seed=int(
            np.random.SeedSequence((cfg.seed, 101, dataset_idx)).generate_state(1)[0]
        ),
    )
    matrix, labels = generate_dataset(gen)
    scales = tuple(build_scales(matrix, cfg.generation.subinterval_counts))
    rng = _cell_rng(cfg.seed, 202, dataset_idx, run_idx)
    train_ids, test_ids = stratified_split(matrix, labels, cfg.r, rng)
    n_init = round_half_up(cfg.lr * len(train_ids))
    n_init = max(1, n_init)
    picked = rng.choice(len(train_ids), size=n_init, replace=False)
    init_ids = [train_ids[int(i)] for i in sorted(picked)]
    return matrix, labels, scales, train_ids, test_ids, init_ids


def _elicit(
    cfg: ExperimentConfig,
    strategy_name: str,
    matrix: DecisionMatrix,
    labels: dict[str, int],
    scales: tuple,
    train_ids: list[str],
    test_ids: list[str],
    init_ids: list[str],
    dataset_idx: int,
    run_idx: int,
    stop_rule,
) -> tuple[list[float], int]:
    """Shared elicitation loop: returns test accuracies per iteration and the
    number of answered questions.  ``stop_rule(t, acc)`` ends the loop."""
    strategy = Strategy(strategy_name)
    strat_idx = cfg.strategies.index(strategy_name)
    examples = [AssignmentExample(a, labels[a]) for a in init_ids]
    accs: list[float] = []
    t = 0
    while True:
        instance = PreferenceInstance(
            matrix, scales, tuple(examples), cfg.generation.q, cfg.alpha,
            cfg.monotone_mode,
        )
        outcome = fit(instance)
        refined = refine_complexity(instance, outcome)
        acc = _accuracy(refined, matrix, test_ids, labels)
        accs.append(acc)
        refs = {ex.alternative_id for ex in examples}
        candidates = [a for a in train_ids if a not in refs]
        if stop_rule(t, acc) or not candidates:
            break
        seed = None
        if strategy.kind == "RAND":
            seed = int(
                np.random.SeedSequence(
                    (cfg.seed, 303, dataset_idx, run_idx, strat_idx, t)
                ).generate_state(1)[0]
            )
        result = select(
            strategy, instance, candidates,
            model=refined if strategy.needs_model else None,
            rng_seed=seed,
        )
        examples.append(AssignmentExample(result.chosen, labels[result.chosen]))
        t += 1
    return accs, t


def run_budget_experiment(cfg: ExperimentConfig) -> list[RunRecord]:
    """Question-budget comparison: test accuracy recorded at t = 0..T."""
    records = []
    for d in range(cfg.datasets):
        for run in range(cfg.runs):
            matrix, labels, scales, train_ids, test_ids, init_ids = _prepare_run(
                cfg, d, run
            )
            if cfg.T > len(train_ids) - len(init_ids):
                raise InvalidInputError(
                    f"budget {cfg.T} exceeds the {len(train_ids) - len(init_ids)} "
                    "available training candidates"
                )
            for strat in cfg.strategies:
                t0 = time.perf_counter()
                accs, aq = _elicit(
                    cfg, strat, matrix, labels, scales, train_ids, test_ids,
                    init_ids, d, run, stop_rule=lambda t, acc: t >= cfg.T,
                )
                records.append(
                    RunRecord(
                        strat, d, run, tuple(accs), None, aq,
                        (time.perf_counter() - t0) * 1000.0,
                    )
                )
    return records


def compute_target_accuracy(cfg: ExperimentConfig, dataset_idx: int,
                            matrix: DecisionMatrix, labels: dict[str, int],
                            scales: tuple) -> float:
    """Mean test accuracy of ten full-training fits (fresh splits)."""
    total = 0.0
    for k in range(10):
        rng = _cell_rng(cfg.seed, 404, dataset_idx, k)
        train_ids, test_ids = stratified_split(matrix, labels, cfg.r, rng)
        examples = tuple(AssignmentExample(a, labels[a]) for a in train_ids)
        instance = PreferenceInstance(
            matrix, scales, examples, cfg.generation.q, cfg.alpha,
            cfg.monotone_mode,
        )
        outcome = fit(instance)
        refined = refine_complexity(instance, outcome)
        total += _accuracy(refined, matrix, test_ids, labels)
    return total / 10.0


def cost_saving(n_train: int, answered: int, n_initial: int) -> float:
    """Cost saving rate: questions avoided relative to labelling all of the
    training data."""
    if n_train <= 0:
        raise InvalidInputError("empty training set")
    return (n_train - answered - n_initial) / n_train


def run_target_experiment(cfg: ExperimentConfig) -> list[RunRecord]:
    """Target-accuracy comparison: elicit until the fitted model matches ten
    full-training fits, then score the saved labelling effort."""
    records = []
    for d in range(cfg.datasets):
        gen = GenerationConfig(
            cfg.generation.n, cfg.generation.m, cfg.generation.q,
            cfg.generation.subinterval_counts, cfg.generation.eta,
            seed=np.random.SeedSequence((cfg.seed, 101, d)).generate_state(1)[0],
        )
        matrix, labels = generate_dataset(gen)
        scales = tuple(build_scales(matrix, cfg.generation.subinterval_counts))
        if cfg.target_accuracy is not None:
            target = cfg.target_accuracy
        else:
            target = compute_target_accuracy(cfg, d, matrix, labels, scales)
        for run in range(cfg.runs):
            _, _, _, train_ids, test_ids, init_ids = _prepare_run(cfg, d, run)
            for strat in cfg.strategies:
                t0 = time.perf_counter()
                accs, aq = _elicit(
                    cfg, strat, matrix, labels, scales, train_ids, test_ids,
                    init_ids, d, run,
                    stop_rule=lambda t, acc: acc >= target,
                )
                cs = cost_saving(len(train_ids), aq, len(init_ids))
                records.append(
                    RunRecord(
                        strat, d, run, None, cs, aq,
                        (time.perf_counter() - t0) * 1000.0,
                    )
                )
    return records


def inconsistency_study(cfg: GenerationConfig, repetitions: int) -> float:
    """Mean minimal inconsistency when the whole dataset is taken as the
    example set; exactly zero for noise-free data."""
    if repetitions < 1:
        raise InvalidInputError("need at least one repetition")
    total = 0.0
    for rep in range(repetitions):
        gen = GenerationConfig(
            cfg.n, cfg.m, cfg.q, cfg.subinterval_counts, cfg.eta,
            seed=np.random.SeedSequence((cfg.seed, 505, rep)).generate_state(1)[0],
        )
        matrix, labels = generate_dataset(gen)
        scales = tuple(build_scales(matrix, cfg.subinterval_counts))
        examples = tuple(
            AssignmentExample(a, labels[a]) for a in matrix.alternative_ids
        )
        instance = PreferenceInstance(matrix, scales, examples, cfg.q, 0.1)
        total += min_inconsistency(instance)
    return total / repetitions


# -- sweep ----------------------------------------------------------------


@dataclass(frozen=True)
class SweepEntry:
    experiment: str
    param_point: str
    mode: str  # "budget" | "target"
    config: ExperimentConfig

    def __post_init__(self):
        if self.mode not in ("budget", "target"):
            raise InvalidInputError(f"unknown sweep mode {self.mode!r}")


def sweep_entry_from_json(doc: dict) -> SweepEntry:
    gen_doc = doc["generation"]
    gen = GenerationConfig(
        n=int(gen_doc["n"]),
        m=int(gen_doc["m"]),
        q=int(gen_doc["q"]),
        subinterval_counts=tuple(int(s) for s in gen_doc["subinterval_counts"]),
        eta=float(gen_doc.get("eta", 0.0)),
        seed=int(gen_doc.get("seed", 0)),
    )
    cfg = ExperimentConfig(
        generation=gen,
        strategies=tuple(doc["strategies"]),
        r=float(doc.get("r", 0.6)),
        lr=float(doc.get("lr", 0.2)),
        T=int(doc.get("T", 30)),
        alpha=float(doc.get("alpha", 0.1)),
        datasets=int(doc.get("datasets", 10)),
        runs=int(doc.get("runs", 10)),
        seed=int(doc.get("seed", 0)),
        monotone_mode=bool(doc.get("monotone_mode", False)),
        target_accuracy=(
            float(doc["target_accuracy"])
            if doc.get("target_accuracy") is not None
            else None
        ),
    )
    return SweepEntry(
        experiment=str(doc.get("experiment", "experiment")),
        param_point=str(doc.get("param_point", "")),
        mode=str(doc.get("mode", "budget")),
        config=cfg,
    )


def _run_entry(entry: SweepEntry) -> list[tuple]:
    run_fn = run_budget_experiment if entry.mode == "budget" else run_target_experiment
    rows = []
    for rec in run_fn(entry.config):
        base = (
            entry.experiment, entry.param_point, rec.strategy,
            rec.dataset, rec.run,
        )
        if rec.accuracies is not None:
            for t, acc in enumerate(rec.accuracies):
                rows.append(
                    base + (t, "accuracy", acc, entry.config.seed, rec.wall_ms)
                )
        if rec.cs is not None:
            rows.append(
                base + (rec.aq, "cs", rec.cs, entry.config.seed, rec.wall_ms)
            )
    return rows


def sweep(
    entries: list[SweepEntry],
    jobs: int = 1,
    timing: bool = True,
) -> str:
    """Run a grid of experiment configs and render the result CSV.

    Rows are sorted on the full cell key, so reruns with the same seeds are
    byte-identical whenever ``timing`` is off (wall_ms is then 0).
    """
    rows: list[tuple] = []
    try:
        if jobs > 1 and len(entries) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for chunk in pool.map(_run_entry, entries):
                    rows.extend(chunk)
        else:
            for entry in entries:
                rows.extend(_run_entry(entry))
    finally:
        rows.sort(key=lambda r: (r[0], r[1], r[2], r[3], r[4], r[5], r[6]))
    return _render_csv(rows, timing)


def _render_csv(rows: list[tuple], timing: bool) -> str:
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in rows:
        (experiment, point, strat, dataset, run, iteration, metric, value,
         seed, wall_ms) = row
        writer.writerow(
            [
                experiment, point, strat, dataset, run, iteration, metric,
                repr(float(value)), seed,
                round_half_up(wall_ms) if timing else 0,
            ]
        )
    return out.getvalue()
