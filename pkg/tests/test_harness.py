"""Benchmark protocol: replicate RMSE, rate fitting, cost accounting."""

import numpy as np
import pytest

from sobolbench.estimators import EstimatorKind
from sobolbench.harness import (
    BenchmarkConfig,
    ConvergenceRecord,
    cost,
    fit_rate,
    group_records,
    resolve_threads,
    rmse_against,
    run_benchmark,
)
from sobolbench.models import InputModel, TestCaseId as CaseId, build

IMPROVED = (
    EstimatorKind.SK,
    EstimatorKind.OWEN,
    EstimatorKind.ORACLE,
    EstimatorKind.DLR,
)


def make_records(rmse_by_n, estimator=EstimatorKind.SK, input_index=1):
    records = []
    for n, rmse in rmse_by_n.items():
        actual, table1 = cost(estimator, 4, n)
        records.append(
            ConvergenceRecord(
                test="Linear4",
                estimator=estimator,
                sampler="QMC",
                input=input_index,
                n=n,
                n_cpu_actual=actual,
                n_cpu_table1=table1,
                rmse=rmse,
                mean_estimate=0.0,
                analytic=0.0,
                k=10,
            )
        )
    return records


# ---------------------------------------------------------------------------
# configuration


def test_config_validation():
    good = BenchmarkConfig(
        test="Linear4", estimators=(EstimatorKind.SK,), sampler="QMC", p_min=8, p_max=10
    )
    assert good.k == 10 and good.fit_window == "upper"
    with pytest.raises(ValueError, match="K"):
        BenchmarkConfig(
            test="Linear4", estimators=(EstimatorKind.SK,), sampler="QMC",
            p_min=8, p_max=10, k=1,
        )
    with pytest.raises(ValueError, match="p_min"):
        BenchmarkConfig(
            test="Linear4", estimators=(EstimatorKind.SK,), sampler="QMC",
            p_min=10, p_max=8,
        )
    with pytest.raises(ValueError, match="sampler"):
        BenchmarkConfig(
            test="Linear4", estimators=(EstimatorKind.SK,), sampler="LHS",
            p_min=8, p_max=10,
        )
    with pytest.raises(ValueError, match="estimator"):
        BenchmarkConfig(test="Linear4", estimators=(), sampler="QMC", p_min=8, p_max=10)


def test_config_coerces_names():
    # both the test case and the estimators accept plain strings
    cfg = BenchmarkConfig(
        test="Linear4", estimators=("sobol", "dlr"), sampler="QMC", p_min=8, p_max=10
    )
    assert cfg.test is CaseId("Linear4")
    assert cfg.estimators == (EstimatorKind.SOBOL, EstimatorKind.DLR)
    with pytest.raises(ValueError):
        BenchmarkConfig(
            test="Linear4", estimators=("bogus",), sampler="QMC", p_min=8, p_max=10
        )


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv("SOBOLBENCH_THREADS", raising=False)
    assert resolve_threads() == 1
    assert resolve_threads(3) == 3
    monkeypatch.setenv("SOBOLBENCH_THREADS", "5")
    assert resolve_threads() == 5
    assert resolve_threads(2) == 2  # explicit argument wins
    with pytest.raises(ValueError):
        resolve_threads(0)


# ---------------------------------------------------------------------------
# run_benchmark


def test_record_count_and_order():
    cfg = BenchmarkConfig(
        test="Linear4", estimators=(EstimatorKind.SK,), sampler="QMC",
        p_min=8, p_max=14,
    )
    records = run_benchmark(cfg)
    assert len(records) == 7 * 4
    keys = [(r.estimator.value, r.input, r.n) for r in records]
    assert keys == sorted(keys)
    assert all(r.k == 10 and r.sampler == "QMC" and r.test == "Linear4" for r in records)
    # rmse decreasing in N for every input, as a fitted trend
    for i in range(1, 5):
        fit = fit_rate([r for r in records if r.input == i], axis="N", window="full")
        assert fit.alpha > 0.0, f"input {i} does not converge"


def test_records_cost_columns():
    cfg = BenchmarkConfig(
        test="Linear4", estimators=(EstimatorKind.SOBOL, EstimatorKind.DLR),
        sampler="QMC", p_min=8, p_max=9,
    )
    for r in run_benchmark(cfg):
        actual, table1 = cost(r.estimator, 4, r.n)
        assert (r.n_cpu_actual, r.n_cpu_table1) == (actual, table1)
        assert r.analytic == pytest.approx(
            build("Linear4").analytic_main[r.input - 1]
        )


def test_thread_count_does_not_change_records():
    cfg = BenchmarkConfig(
        test="Ishigami",
        estimators=(EstimatorKind.SK, EstimatorKind.DLR),
        sampler="MC", p_min=7, p_max=9, k=4,
    )
    assert run_benchmark(cfg, threads=1) == run_benchmark(cfg, threads=4)


def test_master_seed_changes_mc_but_not_qmc():
    base = dict(
        test="Linear4", estimators=(EstimatorKind.SK,), p_min=8, p_max=8, k=3
    )
    mc_a = run_benchmark(BenchmarkConfig(sampler="MC", master_seed=1, **base))
    mc_b = run_benchmark(BenchmarkConfig(sampler="MC", master_seed=2, **base))
    assert mc_a != mc_b
    qmc_a = run_benchmark(BenchmarkConfig(sampler="QMC", master_seed=1, **base))
    qmc_b = run_benchmark(BenchmarkConfig(sampler="QMC", master_seed=2, **base))
    assert qmc_a == qmc_b  # QMC runs index blocks, not seeds


def test_dependent_model_benchmark():
    cfg = BenchmarkConfig(
        test="DepQuad4", estimators=(EstimatorKind.DLR,), sampler="QMC",
        p_min=10, p_max=12,
    )
    records = run_benchmark(cfg)
    assert len(records) == 3 * 4
    # inputs 3 and 4 are measured against an analytic value of exactly 0
    for r in records:
        if r.input in (3, 4):
            assert r.analytic == 0.0
            assert 0.0 <= r.rmse < 0.05


def test_dependent_model_rejects_direct_estimator():
    cfg = BenchmarkConfig(
        test="DepLinear3", estimators=(EstimatorKind.SK,), sampler="QMC",
        p_min=8, p_max=8,
    )
    with pytest.raises(Exception, match="independent inputs"):
        run_benchmark(cfg)


def test_missing_analytic_reference_rejected(monkeypatch):
    import sobolbench.harness as harness

    base = build("Linear4")
    bare = InputModel(name="bare", d=4, f=base.f, marginals=base.marginals)
    monkeypatch.setattr(harness, "build", lambda t: bare)
    cfg = BenchmarkConfig(
        test="Linear4", estimators=(EstimatorKind.SK,), sampler="QMC",
        p_min=8, p_max=8,
    )
    with pytest.raises(ValueError, match="analytic reference"):
        run_benchmark(cfg)


def test_rmse_against_identical_estimates():
    est = np.tile([0.3, 0.5], (10, 1))
    out = rmse_against(est, np.array([0.25, 0.75]))
    assert np.allclose(out, [0.05, 0.25], atol=1e-15)


# ---------------------------------------------------------------------------
# cost accounting


def test_cost_examples():
    assert cost(EstimatorKind.DLR, 10, 1024) == (1024, 1024)
    assert cost(EstimatorKind.OWEN, 3, 1024) == (8192, 8192)
    assert cost(EstimatorKind.SOBOL, 4, 1024) == (5120, 9216)
    assert cost(EstimatorKind.SK, 4, 1024) == (6144, 6144)
    assert cost(EstimatorKind.ORACLE, 7, 2048) == (2048 * 9, 2048 * 9)


def test_cost_actual_never_exceeds_table1():
    for kind in EstimatorKind:
        for d in (1, 3, 10):
            actual, table1 = cost(kind, d, 256)
            assert actual <= table1
            if kind is not EstimatorKind.SOBOL:
                assert actual == table1


# ---------------------------------------------------------------------------
# rate fitting


def test_fit_rate_exact_line():
    records = make_records({2**p: 10.0 / 2**p for p in range(8, 16)})
    fit = fit_rate(records, axis="N", window="full")
    assert fit.alpha == pytest.approx(1.0, abs=1e-12)
    assert fit.c == pytest.approx(10.0, rel=1e-10)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)
    assert fit.n_points == 8 and fit.input == 1


def test_fit_rate_axis_n_cpu_shifts_prefactor():
    # same rmse values against N_CPU = 6N only moves the intercept
    records = make_records({2**p: 10.0 / 2**p for p in range(8, 16)})
    fit = fit_rate(records, axis="N_CPU", window="full")
    assert fit.alpha == pytest.approx(1.0, abs=1e-12)
    assert fit.c == pytest.approx(60.0, rel=1e-10)


def test_fit_rate_upper_window():
    # slope 1 below 2^12, slope 0.5 above: the upper window sees only the tail
    vals = {}
    for p in range(8, 17):
        vals[2**p] = 10.0 / 2**p if p <= 12 else vals[2**12] * (2**12 / 2**p) ** 0.5 * 10 / 10
    records = make_records(vals)
    full = fit_rate(records, axis="N", window="full")
    upper = fit_rate(records, axis="N", window="upper")
    assert upper.n_points == 5  # last max(4, ceil(9/2)) points
    assert upper.alpha == pytest.approx(0.5, abs=1e-10)
    assert 0.5 < full.alpha < 1.0
    assert upper.window == "upper"


def test_fit_rate_drops_noise_floor_points():
    vals = {2**p: 10.0 / 2**p for p in range(8, 16)}
    vals[2**8] = 1e-16  # below the 1e-14 guard: excluded from the fit
    records = make_records(vals)
    fit = fit_rate(records, axis="N", window="full")
    assert fit.n_points == 7
    assert fit.alpha == pytest.approx(1.0, abs=1e-12)


def test_fit_rate_too_few_points():
    records = make_records({2**p: 10.0 / 2**p for p in range(8, 11)})
    with pytest.raises(ValueError, match="4"):
        fit_rate(records, axis="N", window="full")


def test_fit_rate_rejects_mixed_groups():
    records = make_records({256: 0.1, 512: 0.05, 1024: 0.02, 2048: 0.01})
    records += make_records({256: 0.1}, input_index=2)
    with pytest.raises(ValueError, match="single"):
        fit_rate(records, axis="N")
    with pytest.raises(ValueError, match="axis"):
        fit_rate(records[:4], axis="logN")
    with pytest.raises(ValueError, match="window"):
        fit_rate(records[:4], axis="N", window="middle")


def test_group_records_partitions():
    cfg = BenchmarkConfig(
        test="Ishigami",
        estimators=(EstimatorKind.SK, EstimatorKind.DLR),
        sampler="QMC", p_min=8, p_max=10,
    )
    groups = group_records(run_benchmark(cfg))
    assert set(groups) == {
        (k, i) for k in (EstimatorKind.SK, EstimatorKind.DLR) for i in (1, 2, 3)
    }
    for group in groups.values():
        assert [r.n for r in group] == [256, 512, 1024]


# ---------------------------------------------------------------------------
# documented rate behavior on the additive Gaussian model


def test_sobol_mc_rate_near_half():
    cfg = BenchmarkConfig(
        test="Linear4", estimators=(EstimatorKind.SOBOL,), sampler="MC",
        p_min=8, p_max=16,
    )
    groups = group_records(run_benchmark(cfg, threads=4))
    for i in range(1, 5):
        alpha = fit_rate(groups[(EstimatorKind.SOBOL, i)], axis="N").alpha
        assert alpha == pytest.approx(0.5, abs=0.15), f"input {i}: {alpha}"


def test_improved_qmc_rate_near_one():
    # the three direct improved formulas; the binned estimator's rate is
    # capped near 0.5 by the (1 - S_i)/N_m bin bias, so it is not asserted
    cfg = BenchmarkConfig(
        test="Linear4",
        estimators=(EstimatorKind.SK, EstimatorKind.OWEN, EstimatorKind.ORACLE),
        sampler="QMC", p_min=8, p_max=16,
    )
    groups = group_records(run_benchmark(cfg, threads=4))
    for kind in (EstimatorKind.SK, EstimatorKind.OWEN, EstimatorKind.ORACLE):
        for i in range(1, 5):
            alpha = fit_rate(groups[(kind, i)], axis="N").alpha
            assert alpha == pytest.approx(1.0, abs=0.25), f"{kind} input {i}: {alpha}"


def test_improved_formulas_dominate_small_index_input():
    # rate comparison on the p=8..13 ladder plus the always-true level check
    cfg = BenchmarkConfig(
        test="Linear4", estimators=tuple(EstimatorKind), sampler="QMC",
        p_min=8, p_max=13,
    )
    groups = group_records(run_benchmark(cfg, threads=4))
    sobol_group = groups[(EstimatorKind.SOBOL, 1)]
    sobol_alpha = fit_rate(sobol_group, axis="N").alpha
    for kind in IMPROVED:
        group = groups[(kind, 1)]
        assert fit_rate(group, axis="N").alpha >= sobol_alpha - 0.1
        # the original formula's cancellation error keeps its RMSE level
        # above every improved formula at every ladder point
        for s_rec, i_rec in zip(sobol_group, group):
            assert s_rec.rmse > i_rec.rmse
