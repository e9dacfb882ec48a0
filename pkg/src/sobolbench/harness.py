"""Benchmark protocol: RMSE ladders, convergence-rate fits, cost accounting.

For each estimator and each sample count N = 2^p on a ladder, K replicate
runs are performed (disjoint Sobol' blocks for QMC, independently seeded
streams for MC) and the root-mean-square error of each S_i against the
model's analytic value is recorded:

    eps_i(N) = sqrt( (1/K) * sum_k (S_i_hat[k] - S_i_analytic)^2 )

Convergence rates come from least-squares lines through (log10 axis,
log10 eps); the fitted alpha is minus the slope.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .estimators import EstimatorKind, build_plan, estimate_main_index
from .models import InputModel, TestCaseId, build
from .sampling import SamplerSpec

__all__ = [
    "DEFAULT_MASTER_SEED",
    "THREADS_ENV_VAR",
    "BenchmarkConfig",
    "ConvergenceRecord",
    "RateFit",
    "resolve_threads",
    "run_benchmark",
    "rmse_against",
    "fit_rate",
    "cost",
    "group_records",
]

DEFAULT_MASTER_SEED = 123456789

# Number of worker threads used by run_benchmark when not passed explicitly.
THREADS_ENV_VAR = "SOBOLBENCH_THREADS"

# Points with RMSE below this are indistinguishable from machine noise
# (exact-zero analytic indices can produce them) and are dropped from fits.
MIN_FIT_RMSE = 1e-14


@dataclass(frozen=True)
class BenchmarkConfig:
    """One benchmark run: a test case, estimators, sampler, and N ladder."""

    test: TestCaseId
    estimators: tuple[EstimatorKind, ...]
    sampler: str
    p_min: int
    p_max: int
    k: int = 10
    master_seed: int = DEFAULT_MASTER_SEED
    bin_override: Optional[int] = None
    fit_window: str = "upper"

    def __post_init__(self):
        if isinstance(self.test, str):
            object.__setattr__(self, "test", TestCaseId(self.test))
        object.__setattr__(
            self,
            "estimators",
            tuple(
                EstimatorKind(e) if isinstance(e, str) else e
                for e in self.estimators
            ),
        )
        if not self.estimators:
            raise ValueError("at least one estimator is required")
        if self.sampler not in ("MC", "QMC"):
            raise ValueError(f"unknown sampler {self.sampler!r} (use MC or QMC)")
        if self.p_min > self.p_max:
            raise ValueError("p_min must not exceed p_max")
        if self.p_min < 1:
            raise ValueError("p_min must be at least 1")
        if self.k < 2:
            raise ValueError("K must be at least 2")
        if self.fit_window not in ("upper", "full"):
            raise ValueError(f"unknown fit window {self.fit_window!r}")


@dataclass(frozen=True)
class ConvergenceRecord:
    """RMSE of one (estimator, input, N) cell of the ladder."""

    test: str
    estimator: EstimatorKind
    sampler: str
    input: int
    n: int
    n_cpu_actual: int
    n_cpu_table1: int
    rmse: float
    mean_estimate: float
    analytic: float
    k: int


@dataclass(frozen=True)
class RateFit:
    """Fitted rmse ~ c * axis^(-alpha) for one (estimator, input) curve."""

    input: int
    alpha: float
    c: float
    r2: float
    axis: str
    n_points: int
    window: str


def cost(kind: EstimatorKind, d: int, n: int) -> tuple[int, int]:
    """(actual, table1) evaluation counts for a full set of d indices.

    ``actual`` is what the plans here evaluate (main effects only).
    ``table1`` is the published convention, which for the original Sobol'
    formula budgets the joint {S_i, S_i_tot} set: N(2d+1) instead of N(d+1).
    The two differ only for that estimator.
    """
    actual = {
        EstimatorKind.SOBOL: n * (d + 1),
        EstimatorKind.SK: n * (d + 2),
        EstimatorKind.OWEN: n * (2 * d + 2),
        EstimatorKind.ORACLE: n * (d + 2),
        EstimatorKind.DLR: n,
    }[kind]
    table1 = {
        EstimatorKind.SOBOL: n * (2 * d + 1),
        EstimatorKind.SK: n * (d + 2),
        EstimatorKind.OWEN: n * (2 * d + 2),
        EstimatorKind.ORACLE: n * (d + 2),
        EstimatorKind.DLR: n,
    }[kind]
    return actual, table1


def rmse_against(estimates: np.ndarray, analytic: np.ndarray) -> np.ndarray:
    """Per-input RMSE of a (K, d) block of estimates against the d references."""
    est = np.atleast_2d(np.asarray(estimates, dtype=float))
    ref = np.asarray(analytic, dtype=float)
    return np.sqrt(((est - ref) ** 2).mean(axis=0))


def resolve_threads(threads: Optional[int] = None) -> int:
    """Explicit argument wins; else the environment variable; else 1."""
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV_VAR, "1"))
    if threads < 1:
        raise ValueError("thread count must be at least 1")
    return threads


def _sampler_for(cfg: BenchmarkConfig, run_index: int) -> SamplerSpec:
    if cfg.sampler == "QMC":
        return SamplerSpec(kind="QMC", run_index=run_index)
    return SamplerSpec(kind="MC", seed=cfg.master_seed, run_index=run_index)


def _run_cell(
    model: InputModel, cfg: BenchmarkConfig, kind: EstimatorKind, n: int, k: int
) -> np.ndarray:
    plan = build_plan(model, kind, n, _sampler_for(cfg, k), bin_count=cfg.bin_override)
    estimates = estimate_main_index(kind, plan, model)
    return np.array([e.s_i_hat for e in estimates])


def run_benchmark(
    cfg: BenchmarkConfig, threads: Optional[int] = None
) -> list[ConvergenceRecord]:
    """All ConvergenceRecords for the config, sorted by (estimator, input, N).

    Replicates fan out over a thread pool when ``threads`` (or the
    SOBOLBENCH_THREADS variable) exceeds one; every task is a pure function
    of its (estimator, N, run index) triple and results are merged in a fixed
    order, so the output is identical regardless of parallelism.
    """
    model = build(cfg.test)
    if model.analytic_main is None:
        raise ValueError(f"{model.name}: RMSE requires analytic reference indices")
    n_threads = resolve_threads(threads)

    tasks = [
        (kind, 1 << p, k)
        for kind in cfg.estimators
        for p in range(cfg.p_min, cfg.p_max + 1)
        for k in range(cfg.k)
    ]
    results: dict[tuple[EstimatorKind, int, int], np.ndarray] = {}
    if n_threads == 1:
        for kind, n, k in tasks:
            results[(kind, n, k)] = _run_cell(model, cfg, kind, n, k)
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            futures = {
                (kind, n, k): pool.submit(_run_cell, model, cfg, kind, n, k)
                for kind, n, k in tasks
            }
        for key, fut in futures.items():
            results[key] = fut.result()

    records = []
    for kind in cfg.estimators:
        for p in range(cfg.p_min, cfg.p_max + 1):
            n = 1 << p
            block = np.stack([results[(kind, n, k)] for k in range(cfg.k)])
            rmse = rmse_against(block, model.analytic_main)
            mean_est = block.mean(axis=0)
            actual, table1 = cost(kind, model.d, n)
            for i in range(model.d):
                records.append(
                    ConvergenceRecord(
                        test=model.name,
                        estimator=kind,
                        sampler=cfg.sampler,
                        input=i + 1,
                        n=n,
                        n_cpu_actual=actual,
                        n_cpu_table1=table1,
                        rmse=float(rmse[i]),
                        mean_estimate=float(mean_est[i]),
                        analytic=float(model.analytic_main[i]),
                        k=cfg.k,
                    )
                )
    records.sort(key=lambda r: (r.estimator.value, r.input, r.n))
    return records


def group_records(
    records: Sequence[ConvergenceRecord],
) -> dict[tuple[EstimatorKind, int], list[ConvergenceRecord]]:
    """Group a record stream by (estimator, input), each sorted by N."""
    groups: dict[tuple[EstimatorKind, int], list[ConvergenceRecord]] = {}
    for rec in records:
        groups.setdefault((rec.estimator, rec.input), []).append(rec)
    for key in groups:
        groups[key].sort(key=lambda r: r.n)
    return groups


def fit_rate(
    records: Sequence[ConvergenceRecord],
    axis: str = "N",
    window: str = "upper",
) -> RateFit:
    """Least-squares rate fit for one (estimator, input) record group.

    ``axis`` selects the abscissa: sample count N or the actual evaluation
    count N_CPU.  The default window fits the upper half of the ladder
    (largest axis values), where the asymptotic rate holds; ``window="full"``
    uses every point.  Points with rmse below 1e-14 are dropped; fewer than
    4 surviving points is an error.
    """
    if axis not in ("N", "N_CPU"):
        raise ValueError(f"unknown axis {axis!r} (use N or N_CPU)")
    if window not in ("upper", "full"):
        raise ValueError(f"unknown fit window {window!r}")
    keys = {(r.estimator, r.input) for r in records}
    if len(keys) != 1:
        raise ValueError("fit_rate expects records of a single (estimator, input)")
    (_, input_index), = keys

    pts = sorted(
        (
            (r.n if axis == "N" else r.n_cpu_actual, r.rmse)
            for r in records
            if r.rmse >= MIN_FIT_RMSE
        ),
    )
    if window == "upper":
        keep = max(4, (len(pts) + 1) // 2)
        pts = pts[-keep:]
    if len(pts) < 4:
        raise ValueError(
            f"rate fit needs at least 4 usable ladder points, got {len(pts)}"
        )
    x = np.log10([p[0] for p in pts])
    y = np.log10([p[1] for p in pts])
    design = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ np.array([slope, intercept])
    ss_res = float(((y - fitted) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return RateFit(
        input=input_index,
        alpha=float(-slope),
        c=float(10.0**intercept),
        r2=r2,
        axis=axis,
        n_points=len(pts),
        window=window,
    )
