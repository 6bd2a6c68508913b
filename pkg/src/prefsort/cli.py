"""Command-line entry point: replication, simulation, sweeps, batch solving,
inconsistency studies and the HTTP service."""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from prefsort import fixtures
from prefsort.core import (
    AssignmentExample,
    build_scales,
    normalize,
)
from prefsort.errors import PrefsortError
from prefsort.inference import (
    PreferenceInstance,
    fit,
    outcome_to_json,
    refine_complexity,
)
from prefsort.io import load_dataset_csv, write_dataset_csv
from prefsort.simulation import (
    GenerationConfig,
    SweepEntry,
    generate_dataset,
    inconsistency_study,
    sweep,
    sweep_entry_from_json,
)
from prefsort.strategy import Strategy, info_vectors, select_from_vectors


@click.group()
def main():
    """Incremental preference elicitation for multi-criteria sorting."""


@main.command("replicate-example")
@click.option("--tolerance", default=fixtures.VECTOR_TOLERANCE, show_default=True,
              help="Allowed absolute deviation per objective-table value.")
@click.option("--out", type=click.Path(), default=None,
              help="Write the final model JSON here.")
def replicate_example(tolerance: float, out: str | None):
    """Replay the bundled credit-rating elicitation and check it against the
    recorded regression targets (exits non-zero on any deviation)."""
    matrix = fixtures.credit_matrix()
    scales = tuple(build_scales(matrix, fixtures.SUBINTERVALS))
    examples = list(fixtures.INITIAL_EXAMPLES)
    strategy = Strategy("ES")
    failures = 0
    chosen_sequence: list[str] = []

    for t in range(fixtures.BUDGET):
        instance = PreferenceInstance(
            matrix, scales, tuple(examples), fixtures.Q, fixtures.ALPHA
        )
        refs = {ex.alternative_id for ex in examples}
        candidates = [a for a in matrix.alternative_ids if a not in refs]
        vectors = info_vectors(instance, candidates)
        result = select_from_vectors(strategy, instance, vectors)

        expected_table = (
            fixtures.ITERATION0_VECTORS if t == 0
            else fixtures.ITERATION1_VECTORS if t == 1
            else None
        )
        click.echo(f"--- iteration {t}: candidate objective vectors ---")
        for v in vectors:
            cells = "  ".join(f"{x:.4f}" for x in v.values)
            line = f"  {v.alternative_id:>4}  ({cells})  IA={result.scores[v.alternative_id]:.6f}"
            if expected_table is not None:
                diff = max(
                    abs(a - b)
                    for a, b in zip(v.values, expected_table[v.alternative_id])
                )
                ok = diff <= tolerance
                line += f"  target-diff={diff:.1e} {'ok' if ok else 'DEVIATES'}"
                if not ok:
                    failures += 1
            click.echo(line)
        click.echo(f"  -> asks {result.chosen}")
        chosen_sequence.append(result.chosen)
        examples.append(
            AssignmentExample(result.chosen, fixtures.TRUE_LABELS[result.chosen])
        )

    expected_seq = fixtures.EXPECTED_SEQUENCE
    seq_ok = tuple(chosen_sequence) == expected_seq
    click.echo(f"question sequence: {' '.join(chosen_sequence)}")
    click.echo(f"expected         : {' '.join(expected_seq)}  "
               f"{'ok' if seq_ok else 'DEVIATES'}")
    if not seq_ok:
        failures += 1

    instance = PreferenceInstance(
        matrix, scales, tuple(examples), fixtures.Q, fixtures.ALPHA
    )
    outcome = fit(instance)
    refined = refine_complexity(instance, outcome)
    norm = normalize(refined)
    click.echo(f"final objective J* = {outcome.objective:.6f}, "
               f"margin = {outcome.epsilon:.4f}, "
               f"inconsistency = {outcome.inconsistency:.6f}")
    click.echo("normalized thresholds: "
               + " ".join(f"{b:.4f}" for b in norm.normalized_thresholds))
    for b, expected in zip(
        norm.normalized_thresholds, fixtures.EXPECTED_NORMALIZED_THRESHOLDS
    ):
        if abs(b - expected) > 0.05:
            click.echo(f"  threshold {b:.4f} deviates from {expected:.4f}")
            failures += 1

    from prefsort.core import assign_category, comprehensive_utility

    hits = sum(
        1
        for i, aid in enumerate(matrix.alternative_ids)
        if assign_category(
            refined, comprehensive_utility(refined, matrix.performances[i])
        )
        == fixtures.TRUE_LABELS[aid]
    )
    acc = hits / matrix.n
    click.echo(f"accuracy over all {matrix.n} firms: {acc:.2f} "
               f"(recorded value {fixtures.EXPECTED_ACCURACY_ALL:.2f})")
    if abs(acc - fixtures.EXPECTED_ACCURACY_ALL) > 0.10:
        failures += 1

    if out:
        refreshed = outcome_to_json(outcome, matrix.criterion_names)
        Path(out).write_text(json.dumps(refreshed, indent=2), encoding="utf-8")
        click.echo(f"model written to {out}")

    if failures:
        click.echo(f"{failures} regression deviation(s)", err=True)
        sys.exit(1)
    click.echo("replication matches the recorded targets")


@main.command()
@click.option("--n", required=True, type=int)
@click.option("--m", required=True, type=int)
@click.option("--q", required=True, type=int)
@click.option("--s", "subintervals", default=4, show_default=True,
              help="Subintervals per criterion.")
@click.option("--eta", default=0.0, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def simulate(n, m, q, subintervals, eta, seed, out):
    """Generate an artificial labelled dataset CSV."""
    cfg = GenerationConfig(n, m, q, (subintervals,) * m, eta, seed)
    matrix, labels = generate_dataset(cfg)
    write_dataset_csv(out, matrix, labels)
    click.echo(f"wrote {matrix.n} alternatives x {matrix.m} criteria to {out}")


@main.command("sweep")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True,
              help="JSON document with an 'experiments' list.")
@click.option("--out", type=click.Path(), required=True)
@click.option("--jobs", default=1, show_default=True)
@click.option("--timing/--no-timing", default=True, show_default=True,
              help="--no-timing zeroes wall_ms so reruns are byte-identical.")
@click.option("--alpha", default=None, type=float,
              help="Override alpha for every entry.")
@click.option("--strategy", "strategies", multiple=True,
              help="Override the strategy list for every entry (repeatable).")
@click.option("--T", "budget", default=None, type=int,
              help="Override the question budget for every entry.")
@click.option("--target-acc", default=None, type=float,
              help="Switch every entry to target mode with this accuracy.")
@click.option("--seed", default=None, type=int,
              help="Override the master seed for every entry.")
def sweep_cmd(config_path, out, jobs, timing, alpha, strategies, budget,
              target_acc, seed):
    """Run a grid of experiment configurations to CSV."""
    doc = json.loads(Path(config_path).read_text(encoding="utf-8"))
    entries = [sweep_entry_from_json(e) for e in doc.get("experiments", [])]
    if alpha is not None or strategies or budget is not None \
            or target_acc is not None or seed is not None:
        patched = []
        for entry in entries:
            cfg = entry.config
            cfg = replace(
                cfg,
                alpha=alpha if alpha is not None else cfg.alpha,
                strategies=tuple(strategies) or cfg.strategies,
                T=budget if budget is not None else cfg.T,
                seed=seed if seed is not None else cfg.seed,
                target_accuracy=(
                    target_acc if target_acc is not None
                    else cfg.target_accuracy
                ),
            )
            mode = "target" if target_acc is not None else entry.mode
            patched.append(SweepEntry(entry.experiment, entry.param_point,
                                      mode, cfg))
        entries = patched
    csv_text = sweep(entries, jobs=jobs, timing=timing)
    Path(out).write_text(csv_text, encoding="utf-8")
    rows = max(0, len(csv_text.splitlines()) - 1)
    click.echo(f"wrote {rows} rows to {out}")


@main.command()
@click.option("--data", type=click.Path(exists=True), required=True,
              help="Labelled dataset CSV.")
@click.option("--alpha", default=0.1, show_default=True)
@click.option("--s", "subintervals", default=4, show_default=True)
@click.option("--q", default=None, type=int,
              help="Category count; defaults to the largest label.")
@click.option("--monotone", is_flag=True, default=False)
@click.option("--out", type=click.Path(), default=None,
              help="Model JSON destination (stdout when omitted).")
def solve(data, alpha, subintervals, q, monotone, out):
    """Fit the sorting model to a labelled CSV and emit model JSON."""
    matrix, labels = load_dataset_csv(data)
    if labels is None:
        raise click.ClickException("dataset has no label column")
    q = q or max(labels.values())
    scales = tuple(build_scales(matrix, (subintervals,) * matrix.m))
    examples = tuple(
        AssignmentExample(a, labels[a]) for a in matrix.alternative_ids
    )
    instance = PreferenceInstance(matrix, scales, examples, q, alpha, monotone)
    outcome = fit(instance)
    refined = refine_complexity(instance, outcome)
    doc = outcome_to_json(
        replace(outcome, model=refined), matrix.criterion_names
    )
    text = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"model written to {out}")
    else:
        click.echo(text)


@main.command()
@click.option("--n", default=100, show_default=True)
@click.option("--m", default=4, show_default=True)
@click.option("--q", default=3, show_default=True)
@click.option("--s", "subintervals", default=4, show_default=True)
@click.option("--eta", default=0.05, show_default=True)
@click.option("--reps", default=50, show_default=True)
@click.option("--seed", default=0, show_default=True)
def inconsistency(n, m, q, subintervals, eta, reps, seed):
    """Mean minimal inconsistency of whole generated datasets."""
    cfg = GenerationConfig(n, m, q, (subintervals,) * m, eta, seed)
    mean = inconsistency_study(cfg, reps)
    click.echo(f"mean ICI over {reps} repetitions (eta={eta}): {mean!r}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True,
              envvar="PREFSORT_HOST")
@click.option("--port", default=8760, show_default=True, envvar="PREFSORT_PORT")
@click.option("--data-dir", default="./prefsort-data", show_default=True,
              envvar="PREFSORT_DATA_DIR")
@click.option("--seed", default=0, show_default=True)
@click.option("--workers", default=2, show_default=True,
              help="Worker threads for question selection.")
@click.option("--static-dir", default=None, envvar="PREFSORT_STATIC_DIR",
              help="Serve the web console from this directory.")
def serve(host, port, data_dir, seed, workers, static_dir):
    """Start the HTTP session service."""
    import uvicorn

    from prefsort.service import create_app

    app = create_app(data_dir, seed=seed, workers=workers, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


def run(argv: list[str] | None = None) -> int:
    """Programmatic entry point returning the exit code."""
    try:
        main.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except SystemExit as exc:
        return int(exc.code or 0)
    except PrefsortError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(run())
