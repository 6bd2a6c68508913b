import numpy as np
import pytest

from prefsort.errors import InvalidInputError
from prefsort.simulation import (
    ExperimentConfig,
    GenerationConfig,
    SweepEntry,
    cost_saving,
    generate_dataset,
    inconsistency_study,
    round_half_up,
    run_budget_experiment,
    run_target_experiment,
    stratified_split,
    sweep,
    sweep_entry_from_json,
)


def small_experiment(strategies=("ES", "RAND"), T=3, **kw):
    return ExperimentConfig(
        generation=GenerationConfig(20, 2, 2, (3, 3), eta=0.05, seed=5),
        strategies=strategies,
        r=0.6,
        lr=0.2,
        T=T,
        alpha=0.1,
        datasets=1,
        runs=2,
        seed=9,
        **kw,
    )


class TestRoundHalfUp:
    def test_convention(self):
        assert round_half_up(3.5) == 4
        assert round_half_up(2.5) == 3
        assert round_half_up(2.4) == 2
        assert round_half_up(5.0) == 5


class TestGeneration:
    def test_noise_count_exact(self):
        cfg = GenerationConfig(100, 4, 3, (4,) * 4, eta=0.05, seed=1)
        matrix, labels = generate_dataset(cfg)
        clean_cfg = GenerationConfig(100, 4, 3, (4,) * 4, eta=0.0, seed=1)
        clean_matrix, clean = generate_dataset(clean_cfg)
        assert np.array_equal(matrix.performances, clean_matrix.performances)
        flipped = [a for a in labels if labels[a] != clean[a]]
        assert len(flipped) == round_half_up(100 * 0.05) == 5
        for a in flipped:
            assert labels[a] != clean[a]

    def test_noise_free_labels_unchanged(self):
        cfg = GenerationConfig(50, 3, 3, (4, 4, 4), eta=0.0, seed=2)
        _, labels = generate_dataset(cfg)
        _, again = generate_dataset(cfg)
        assert labels == again

    def test_two_category_balance(self):
        cfg = GenerationConfig(100, 4, 2, (4,) * 4, eta=0.0, seed=3)
        _, labels = generate_dataset(cfg)
        counts = {1: 0, 2: 0}
        for c in labels.values():
            counts[c] += 1
        assert abs(counts[1] - 50) <= 10
        assert abs(counts[2] - 50) <= 10

    def test_matrix_shape_and_range(self):
        cfg = GenerationConfig(30, 5, 3, (2,) * 5, eta=0.0, seed=4)
        matrix, labels = generate_dataset(cfg)
        assert matrix.performances.shape == (30, 5)
        assert matrix.performances.min() >= 0.0
        assert matrix.performances.max() <= 100.0
        assert set(labels.values()) <= {1, 2, 3}

    def test_config_validation(self):
        with pytest.raises(InvalidInputError):
            GenerationConfig(2, 2, 3, (2, 2), eta=0.0, seed=0)
        with pytest.raises(InvalidInputError):
            GenerationConfig(10, 2, 3, (2, 2), eta=1.5, seed=0)
        with pytest.raises(InvalidInputError):
            GenerationConfig(10, 2, 3, (2,), eta=0.0, seed=0)


class TestSplit:
    def test_stratification_within_one_per_category(self):
        cfg = GenerationConfig(60, 3, 3, (3, 3, 3), eta=0.0, seed=6)
        matrix, labels = generate_dataset(cfg)
        rng = np.random.default_rng(0)
        train, test = stratified_split(matrix, labels, 0.6, rng)
        assert len(train) + len(test) == 60
        assert not set(train) & set(test)
        for cat in (1, 2, 3):
            members = [a for a in matrix.alternative_ids if labels[a] == cat]
            in_train = sum(1 for a in members if a in set(train))
            assert abs(in_train - 0.6 * len(members)) <= 1.0


class TestCostSaving:
    def test_unit_vectors(self):
        # the published arithmetic cases, exact
        assert cost_saving(60, 30, 0) == pytest.approx(0.5)
        assert cost_saving(60, 10, round_half_up(0.2 * 60)) == pytest.approx(
            (60 - 10 - 12) / 60
        )
        assert cost_saving(60, 10, 12) == pytest.approx(0.6333, abs=1e-4)
        # consuming every training label saves nothing
        assert cost_saving(60, 48, 12) == 0.0

    def test_rejects_empty_training(self):
        with pytest.raises(InvalidInputError):
            cost_saving(0, 0, 0)


class TestBudgetExperiment:
    def test_trajectory_length_contract(self):
        records = run_budget_experiment(small_experiment(T=3))
        assert len(records) == 2 * 1 * 2  # strategies x datasets x runs
        for rec in records:
            assert len(rec.accuracies) == 4  # T + 1
            assert all(0.0 <= a <= 1.0 for a in rec.accuracies)

    def test_paired_seed_discipline(self):
        records = run_budget_experiment(small_experiment(T=2))
        # same (dataset, run) across strategies shares the starting point:
        # identical Acc^0 because split and initial examples are identical
        by_cell = {}
        for rec in records:
            by_cell.setdefault((rec.dataset, rec.run), []).append(rec)
        for cell, recs in by_cell.items():
            first = {rec.accuracies[0] for rec in recs}
            assert len(first) == 1, cell

    def test_rerun_is_identical(self):
        a = run_budget_experiment(small_experiment(T=2))
        b = run_budget_experiment(small_experiment(T=2))
        assert [(r.strategy, r.accuracies) for r in a] == [
            (r.strategy, r.accuracies) for r in b
        ]

    def test_budget_exceeding_candidates_rejected(self):
        with pytest.raises(InvalidInputError):
            run_budget_experiment(small_experiment(T=50))


class TestTargetExperiment:
    def test_cost_saving_outputs(self):
        records = run_target_experiment(small_experiment())
        assert len(records) == 4
        for rec in records:
            n1 = 12  # 20 alternatives, r=0.6, stratified
            assert rec.cs is not None
            assert rec.aq >= 0
            # CS consistent with the aq actually recorded
            n_init = round_half_up(0.2 * n1)
            assert rec.cs == pytest.approx((n1 - rec.aq - n_init) / n1)

    def test_exhaustion_guard(self):
        # an unreachable target stops at candidate exhaustion
        cfg = small_experiment(strategies=("SM",))
        records = run_target_experiment(cfg)
        for rec in records:
            assert rec.aq <= 12


class TestInconsistencyStudy:
    def test_noise_free_is_exactly_zero(self):
        cfg = GenerationConfig(30, 3, 3, (3, 3, 3), eta=0.0, seed=11)
        assert inconsistency_study(cfg, repetitions=5) == 0.0

    def test_noise_direction(self):
        lo = inconsistency_study(
            GenerationConfig(40, 2, 3, (3, 3), eta=0.05, seed=11), 10
        )
        hi = inconsistency_study(
            GenerationConfig(40, 2, 3, (3, 3), eta=0.25, seed=11), 10
        )
        assert hi >= lo


class TestSweep:
    def entry(self, name="exp", point="alpha=0.1", mode="budget", **kw):
        return SweepEntry(name, point, mode, small_experiment(**kw))

    def test_row_count_contract(self):
        # 3 param points x 2 strategies x 1 dataset x 2 runs x (T+1 = 3) rows
        entries = [
            self.entry(point=f"alpha={a}", T=2) for a in (0.1, 0.3, 0.5)
        ]
        csv_text = sweep(entries, timing=False)
        rows = csv_text.strip().splitlines()
        assert rows[0].startswith("experiment,param_point,strategy")
        assert len(rows) - 1 == 3 * 2 * 1 * 2 * 3

    def test_empty_grid(self):
        csv_text = sweep([], timing=False)
        assert csv_text.strip().splitlines() == [
            "experiment,param_point,strategy,dataset,run,iteration,metric,"
            "value,seed,wall_ms"
        ]

    def test_rerun_byte_identical(self):
        entries = [self.entry(T=2)]
        assert sweep(entries, timing=False) == sweep(entries, timing=False)

    def test_parallel_jobs_match_serial(self):
        entries = [
            self.entry(point=f"alpha={a}", T=1) for a in (0.1, 0.3)
        ]
        assert sweep(entries, jobs=2, timing=False) == sweep(
            entries, jobs=1, timing=False
        )

    def test_target_mode_rows(self):
        entries = [self.entry(mode="target")]
        csv_text = sweep(entries, timing=False)
        lines = csv_text.strip().splitlines()[1:]
        assert len(lines) == 4
        assert all(",cs," in line for line in lines)

    def test_json_round_trip(self):
        doc = {
            "experiment": "noise-sweep",
            "param_point": "eta=0.1",
            "mode": "budget",
            "generation": {
                "n": 20, "m": 2, "q": 2,
                "subinterval_counts": [3, 3], "eta": 0.1, "seed": 5,
            },
            "strategies": ["ES", "RAND"],
            "T": 2, "datasets": 1, "runs": 1, "seed": 3,
        }
        entry = sweep_entry_from_json(doc)
        assert entry.experiment == "noise-sweep"
        assert entry.config.generation.eta == 0.1
        assert entry.config.strategies == ("ES", "RAND")
