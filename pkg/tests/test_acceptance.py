"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  The two statistical-trend criteria at the end run full experiments
and take a few minutes combined.
"""

import itertools
import json
import time
from contextlib import contextmanager

import numpy as np
import pytest

import specuq as sq
from specuq.datasets import make_regeneration_source
from specuq.experiment import emit, load_config, run_experiment


@contextmanager
def criterion(name, budget_s=None):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\n[acceptance] {name}: FAIL")
        raise
    elapsed = time.perf_counter() - started
    if budget_s is not None and elapsed > budget_s:
        print(f"\n[acceptance] {name}: FAIL (runtime {elapsed:.1f}s > {budget_s}s)")
        pytest.fail(f"{name}: runtime {elapsed:.1f}s exceeds budget {budget_s}s")
    print(f"\n[acceptance] {name}: PASS ({elapsed:.1f}s)")


def test_restriction_consistency():
    with criterion("restriction consistency", budget_s=10):
        rng = np.random.default_rng(2024)
        for index in range(50):
            n = int(rng.integers(10, 61))
            d = int(rng.choice([1, 2, 5]))
            X = sq.DataSet(rng.normal(size=(n, d)) * rng.uniform(0.5, 2.0))
            sigma = sq.mst_sigma(X)
            bundle = sq.laplacian(sq.similarity_matrix(X, sigma))
            pair = sq.fiedler_pair(bundle)
            ef = sq.ExtendedEigenfunction.from_clustering(X, sigma, bundle, pair)
            levels = sq.extend(ef, X)
            assert np.max(np.abs(levels - pair.vector)) <= 1e-8, f"set {index}"
            direct_in, direct_out = sq.bi_cluster(pair.vector)
            extended_in, extended_out = sq.bi_cluster(levels)
            assert np.array_equal(direct_in, extended_in), f"set {index}"
            assert np.array_equal(direct_out, extended_out), f"set {index}"


def test_identity_corruption():
    with criterion("identity corruption", budget_s=5):
        cfg = load_config(
            {
                "generator": {"kind": "point_in_circle", "m": 25, "seed": 7},
                "corruption": {"deletion_range": [0.0, 0.0], "master_seed": 1},
                "similarity": {},
                "mc_samples": 20,
                "epsilon_grid": [0.0],
            }
        )
        output = run_experiment(cfg)
        report = output.runs[0].report
        assert report.expected_misclustering_rate == 0.0
        assert set(np.unique(report.coverage)) <= {0.0, 1.0}
        reference = np.flatnonzero(output.reference_membership)
        assert np.array_equal(report.vorobev_set, reference)
        assert np.array_equal(report.odf_set, reference)
        assert np.array_equal(report.spectral_set, reference)
        assert report.M == 20 and not output.runs[0].skipped


def test_vorobev_minimality_by_enumeration():
    with criterion("Vorob'ev minimality by enumeration", budget_s=30):
        rng = np.random.default_rng(99)
        for instance in range(200):
            n = int(rng.integers(1, 9))
            m = int(rng.integers(1, 7))
            memberships = [rng.random(n) < rng.random() for _ in range(m)]
            X = sq.DataSet(rng.normal(size=(n, 2)))
            reference = np.zeros(n, dtype=bool)
            acc = sq.Accumulator(size=n)
            for memb in memberships:
                levels = np.where(memb, 1.0, -1.0)
                sq.accumulate(
                    acc,
                    sq.ClusterSample(
                        membership=memb,
                        levels=levels,
                        odf=sq.odf_values(memb, X),
                        sample_cardinality=int(memb.sum()),
                    ),
                    reference,
                )
            report = sq.finalize(acc, reference)
            chosen = np.zeros(n, dtype=bool)
            chosen[report.vorobev_set] = True
            size = int(chosen.sum())

            def mean_symdiff(mask):
                return sum(
                    int(np.count_nonzero(memb != mask)) for memb in memberships
                ) / m

            best = min(
                mean_symdiff(np.array(candidate))
                for candidate in itertools.product([False, True], repeat=n)
                if sum(candidate) == size
            )
            achieved = mean_symdiff(chosen)
            assert achieved <= best + 1e-9, f"instance {instance}"


def test_bernoulli_random_set_oracle():
    with criterion("Bernoulli random-set oracle", budget_s=5):
        inclusion = np.array([0.9, 0.7, 0.5, 0.3, 0.1])
        M = 100_000
        rng = np.random.default_rng(2)
        draws = rng.random((M, inclusion.size)) < inclusion
        reference = np.zeros(inclusion.size, dtype=bool)
        acc = sq.Accumulator(size=inclusion.size)
        for row in draws:
            levels = np.where(row, 0.5, -0.5)
            sq.accumulate(
                acc,
                sq.ClusterSample(
                    membership=row,
                    levels=levels,
                    odf=levels,
                    sample_cardinality=int(row.sum()),
                ),
                reference,
            )
        report = sq.finalize(acc, reference)
        standard_error = np.sqrt(inclusion * (1 - inclusion) / M)
        assert np.all(np.abs(report.coverage - inclusion) <= 3 * standard_error)
        # analytic Vorob'ev set: mean cardinality 2.5, threshold 0.5, and the
        # half-down cardinality rule keeps the two points above the threshold.
        # The empirical mean cardinality of this fixed stream also lands at
        # or below 2.5, so the estimate must match exactly.
        analytic = np.array([0, 1])
        assert np.array_equal(report.vorobev_set, analytic)
        assert {0, 1} <= set(report.vorobev_set.tolist()) <= {0, 1, 2}


def test_eigen_correctness():
    with criterion("eigen correctness", budget_s=30):
        rng = np.random.default_rng(5)
        for _ in range(30):
            n = int(rng.integers(2, 80))
            d = int(rng.integers(1, 6))
            X = sq.DataSet(rng.normal(size=(n, d)))
            bundle = sq.laplacian(sq.similarity_matrix(X, sigma=rng.uniform(0.3, 2.0)))
            pair = sq.fiedler_pair(bundle)
            residual = np.linalg.norm(bundle.L @ pair.vector - pair.value * pair.vector)
            assert residual <= 1e-8
            eigenvalues = np.linalg.eigvalsh(bundle.L)
            assert eigenvalues[0] >= -1e-8 and eigenvalues[-1] <= 2 + 1e-8


def _normalized_summary(path, scrub_execution):
    summary = json.loads(path.read_text(encoding="utf-8"))
    for entry in summary["reports"]:
        entry["wall_time_s"] = 0.0
    if scrub_execution:
        summary["config"]["workers"] = 0
        summary["config"]["output_dir"] = ""
    return summary


def test_full_run_determinism(tmp_path):
    # Byte-identity covers every output byte except summary.json's wall-clock
    # timings (and, when worker counts differ, the config echo of the
    # execution fields, which do not affect any computed value).
    with criterion("full-run determinism, workers 1 vs 8", budget_s=120):
        base = {
            "generator": {"kind": "point_in_circle", "m": 25, "seed": 7},
            "corruption": {"deletion_range": [0.01, 0.07], "master_seed": 42},
            "similarity": {},
            "mc_samples": 50,
            "epsilon_grid": [0.025, 0.05, 0.1, 0.2, 0.4],
            "output_dir": "out",
        }
        for name, workers in (("a", 1), ("b", 1), ("c", 8)):
            started = time.perf_counter()
            cfg = load_config(base, {"workers": workers})
            emit(run_experiment(cfg), tmp_path / name)
            assert time.perf_counter() - started < 60

        csv_names = sorted(p.name for p in (tmp_path / "a").glob("*.csv"))
        assert len(csv_names) == 6  # points + five reports
        for name in csv_names:
            reference_bytes = (tmp_path / "a" / name).read_bytes()
            assert (tmp_path / "b" / name).read_bytes() == reference_bytes
            assert (tmp_path / "c" / name).read_bytes() == reference_bytes

        summary_a = _normalized_summary(tmp_path / "a" / "summary.json", False)
        summary_b = _normalized_summary(tmp_path / "b" / "summary.json", False)
        assert summary_a == summary_b
        assert _normalized_summary(
            tmp_path / "a" / "summary.json", True
        ) == _normalized_summary(tmp_path / "c" / "summary.json", True)
        assert summary_a["config_hash"] == summary_b["config_hash"]


def test_misclustering_trend_replication():
    with criterion("misclustering trend over noise levels", budget_s=1800):
        cfg = load_config(
            {
                "generator": {"kind": "point_in_circle", "m": 133, "seed": 5},
                "corruption": {"deletion_range": [0.01, 0.07], "master_seed": 31},
                "similarity": {},
                "mc_samples": 200,
                "epsilon_grid": [0.025, 0.05, 0.1, 0.2, 0.4],
                "workers": 8,
            }
        )
        output = run_experiment(cfg)
        rates = [run.report.expected_misclustering_rate for run in output.runs]
        inversions = sum(
            1 for i in range(len(rates) - 1) if rates[i + 1] < rates[i]
        )
        assert inversions <= 1, f"rates not monotone enough: {rates}"
        rate_at_005 = rates[1]
        rate_at_04 = rates[4]
        assert rate_at_005 * 2 <= rate_at_04, f"rates: {rates}"


def test_monte_carlo_convergence():
    with criterion("Monte Carlo coverage convergence", budget_s=300):
        spec = sq.GeneratorSpec(kind="point_in_circle", m=34, seed=101)
        X = sq.make_dataset(spec)
        sigma = sq.mst_sigma(X)
        pair = sq.fiedler_pair(sq.laplacian(sq.similarity_matrix(X, sigma)))
        ctx = sq.GaugeContext(pair.vector)
        reference = pair.vector >= 0
        source = make_regeneration_source(spec)
        corruption = sq.CorruptionConfig(
            deletion_range=(0.01, 0.07), noise_std=0.1, master_seed=77
        )
        acc = sq.Accumulator(size=len(X))
        checkpoints = {}
        for index in range(10_000):
            sample = sq.corrupt(X, corruption, source, index)
            clustering = sq.cluster_reference_under_sample(X, sample, sigma, ctx)
            sq.accumulate(acc, clustering, reference)
            if acc.sample_count in (100, 1_000, 10_000):
                checkpoints[acc.sample_count] = sq.coverage(acc).copy()
        step_one = np.max(np.abs(checkpoints[100] - checkpoints[1_000]))
        step_two = np.max(np.abs(checkpoints[1_000] - checkpoints[10_000]))
        assert step_one >= 2 * step_two, (
            f"coverage differences did not shrink: {step_one:.4f} -> {step_two:.4f}"
        )
