"""Main-effect index estimators and their evaluation plans.

Five estimators of the partial variance D_i are provided, all dividing by a
shared estimate of the total variance D to give S_i = D_i / D:

* ``sobol``  : mean(fA * fAB_i) - mean(fA)^2            (two sample sets)
* ``sk``     : mean(fA * (fAB_i - fB))                  (two sample sets)
* ``owen``   : mean((fA - fCA_i) * (fAB_i - fB))        (three sample sets)
* ``oracle`` : mean((fA - f0) * (fAB_i - fB))           (exact mean f0)
* ``dlr``    : sort by x_i, bin, variance of bin means  (single sample set)

A plan materializes exactly the model evaluations an estimator needs for all
d inputs from one unit point set of dimension d, 2d, or 3d, whose coordinate
blocks form the base matrices A, B, C.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .models import InputModel
from .sampling import (
    SamplerSpec,
    UnitPointSet,
    generate_uniform,
    transform_correlated_normal,
    transform_independent,
)

__all__ = [
    "EstimatorKind",
    "BinSchedule",
    "EvaluationPlan",
    "IndexEstimate",
    "IncompatibleModelError",
    "DegenerateModelError",
    "default_bin_schedule",
    "build_plan",
    "estimate_mean_and_variance",
    "estimate_sobol_original",
    "estimate_sk",
    "estimate_owen",
    "estimate_oracle",
    "estimate_dlr",
    "estimate_main_index",
]


class EstimatorKind(Enum):
    SOBOL = "sobol"
    SK = "sk"
    OWEN = "owen"
    ORACLE = "oracle"
    DLR = "dlr"


class IncompatibleModelError(ValueError):
    """Estimator cannot be applied to the given model."""


class DegenerateModelError(ValueError):
    """Sample variance is not positive; indices are undefined."""


@dataclass(frozen=True)
class BinSchedule:
    """Partition of N sorted samples into M bins of N_m points each."""

    n: int
    m: int
    n_m: int

    def __post_init__(self):
        if self.m * self.n_m != self.n:
            raise ValueError("bin schedule must satisfy M * N_m = N")
        if self.m < 2 or self.n_m < 2:
            raise ValueError("bin schedule requires M >= 2 and N_m >= 2")


def default_bin_schedule(n: int) -> BinSchedule:
    """M = 2^ceil(p/2) bins for N = 2^p, so M ~ sqrt(N)."""
    if n < 4 or n & (n - 1) != 0:
        raise ValueError(
            f"default bin schedule requires N = 2^p with p >= 2, got N={n}; "
            "pass an explicit bin count for other N"
        )
    p = n.bit_length() - 1
    m = 1 << ((p + 1) // 2)
    return BinSchedule(n=n, m=m, n_m=n // m)


@dataclass(frozen=True)
class EvaluationPlan:
    """Model outputs required by one estimator for all d inputs.

    ``f_ab[i]`` holds outputs at B with column i replaced from A (the point
    that shares coordinate i with A); ``f_ca[i]`` holds outputs at A with
    column i replaced from C (Owen's third set).  ``eval_count`` equals the
    total size of all populated output arrays.
    """

    kind: EstimatorKind
    n: int
    d: int
    x_a: np.ndarray
    f_a: np.ndarray
    f_b: Optional[np.ndarray] = None
    f_ab: Optional[np.ndarray] = None
    f_ca: Optional[np.ndarray] = None
    f_c: Optional[np.ndarray] = None
    bins: Optional[BinSchedule] = None
    f0_source: Optional[str] = None
    eval_count: int = 0


def _transform_block(model: InputModel, u: UnitPointSet) -> np.ndarray:
    if model.covariance is not None:
        return transform_correlated_normal(u, model.covariance)
    return transform_independent(u, model.marginals)


def _unit_block(values: np.ndarray, lo: int, hi: int) -> UnitPointSet:
    return UnitPointSet(n=values.shape[0], dims=hi - lo, values=values[:, lo:hi])


def build_plan(
    model: InputModel,
    kind: EstimatorKind,
    n: int,
    sampler: SamplerSpec,
    bin_count: Optional[int] = None,
) -> EvaluationPlan:
    """Generate the point sets and model evaluations for one estimator run.

    One unit point set of dimension d (DLR), 2d (Sobol/S-K/Oracle), or 3d
    (Owen, and Oracle when f0 must be pre-estimated) is drawn; its coordinate
    blocks become the matrices A, B, C in model space.  Direct estimators
    reject dependent-input models; DLR rejects sample counts the bin schedule
    cannot partition.
    """
    d = model.d
    if kind != EstimatorKind.DLR and model.has_dependent_inputs:
        raise IncompatibleModelError(
            f"estimator {kind.value!r} on {model.name}: "
            "direct formulas assume independent inputs"
        )

    if kind == EstimatorKind.DLR:
        if bin_count is not None:
            if n % bin_count != 0:
                raise ValueError(
                    f"bin count {bin_count} does not divide sample count {n}"
                )
            bins = BinSchedule(n=n, m=bin_count, n_m=n // bin_count)
        else:
            bins = default_bin_schedule(n)
        u = generate_uniform(sampler, n, d)
        a = _transform_block(model, u)
        f_a = model.f(a)
        return EvaluationPlan(
            kind=kind, n=n, d=d, x_a=a, f_a=f_a, bins=bins, eval_count=n
        )

    needs_c = kind == EstimatorKind.OWEN or (
        kind == EstimatorKind.ORACLE and model.analytic_f0 is None
    )
    dims = 3 * d if needs_c else 2 * d
    u = generate_uniform(sampler, n, dims)
    a = _transform_block(model, _unit_block(u.values, 0, d))
    b = _transform_block(model, _unit_block(u.values, d, 2 * d))
    f_a = model.f(a)
    f_b = model.f(b) if kind != EstimatorKind.SOBOL else None
    f_ab = np.empty((d, n))
    for i in range(d):
        ab_i = b.copy()
        ab_i[:, i] = a[:, i]
        f_ab[i] = model.f(ab_i)
    eval_count = n * (d + 1) + (n if f_b is not None else 0)

    f_ca = None
    f_c = None
    f0_source = None
    if kind == EstimatorKind.OWEN:
        c = _transform_block(model, _unit_block(u.values, 2 * d, 3 * d))
        f_ca = np.empty((d, n))
        for i in range(d):
            ca_i = a.copy()
            ca_i[:, i] = c[:, i]
            f_ca[i] = model.f(ca_i)
        eval_count += d * n
    elif kind == EstimatorKind.ORACLE:
        if model.analytic_f0 is not None:
            f0_source = "analytic"
        else:
            # No exact mean available: spend one extra block on estimating it.
            c = _transform_block(model, _unit_block(u.values, 2 * d, 3 * d))
            f_c = model.f(c)
            eval_count += n
            f0_source = "estimated"

    return EvaluationPlan(
        kind=kind,
        n=n,
        d=d,
        x_a=a,
        f_a=f_a,
        f_b=f_b,
        f_ab=f_ab,
        f_ca=f_ca,
        f_c=f_c,
        f0_source=f0_source,
        eval_count=eval_count,
    )


def estimate_mean_and_variance(
    f_a: np.ndarray, f_b: Optional[np.ndarray] = None
) -> tuple[float, float]:
    """Pooled (f0_hat, D_hat) over all provided outputs.

    D_hat = mean of squares - f0_hat^2; a non-positive value aborts
    estimation since S_i = D_i / D is then undefined.
    """
    pooled = f_a if f_b is None else np.concatenate([f_a, f_b])
    if pooled.size == 0:
        raise ValueError("at least one output array must be nonempty")
    f0_hat = float(pooled.mean())
    d_hat = float((pooled**2).mean() - f0_hat**2)
    if d_hat <= 0.0:
        raise DegenerateModelError("degenerate model (zero variance)")
    return f0_hat, d_hat


def estimate_sobol_original(f_a: np.ndarray, f_ab_i: np.ndarray) -> float:
    """D_i_hat = mean(fA * fAB_i) - mean(fA)^2.

    The subtracted square of the estimated mean is the known weakness of this
    formula: for |f0| >> sqrt(D_i) the cancellation error dominates.
    """
    return float((f_a * f_ab_i).mean() - f_a.mean() ** 2)


def estimate_sk(f_a: np.ndarray, f_b: np.ndarray, f_ab_i: np.ndarray) -> float:
    """D_i_hat = mean(fA * (fAB_i - fB))."""
    return float((f_a * (f_ab_i - f_b)).mean())


def estimate_owen(
    f_a: np.ndarray, f_b: np.ndarray, f_ab_i: np.ndarray, f_ca_i: np.ndarray
) -> float:
    """D_i_hat = mean((fA - fCA_i) * (fAB_i - fB))."""
    return float(((f_a - f_ca_i) * (f_ab_i - f_b)).mean())


def estimate_oracle(
    f_a: np.ndarray, f_b: np.ndarray, f_ab_i: np.ndarray, f0: float
) -> float:
    """D_i_hat = mean((fA - f0) * (fAB_i - fB)) with f0 the exact mean."""
    return float(((f_a - f0) * (f_ab_i - f_b)).mean())


def estimate_dlr(
    x_i_column: np.ndarray, f_a: np.ndarray, bins: BinSchedule
) -> float:
    """Double-loop-reordering estimate from a single sample set.

    Samples are ordered by the x_i coordinate (ties broken by original sample
    index, so the partition is deterministic), split into M consecutive bins
    of N_m points, and D_i_hat = (1/M) sum_j m_j^2 - f0_hat^2 with m_j the
    bin means and f0_hat the plain mean of all N outputs.
    """
    if x_i_column.shape[0] != bins.n or f_a.shape[0] != bins.n:
        raise ValueError("array length does not match the bin schedule")
    order = np.argsort(x_i_column, kind="stable")
    bin_means = f_a[order].reshape(bins.m, bins.n_m).mean(axis=1)
    return float((bin_means**2).mean() - f_a.mean() ** 2)


@dataclass(frozen=True)
class IndexEstimate:
    """One estimated main-effect index (input indices are 1-based)."""

    kind: EstimatorKind
    input: int
    d_i_hat: float
    d_hat: float
    s_i_hat: float
    n: int
    eval_count_share: float
    f0_source: Optional[str] = None


def estimate_main_index(
    kind: EstimatorKind, plan: EvaluationPlan, model: InputModel
) -> list[IndexEstimate]:
    """All d main-effect estimates from one plan.

    Every input divides by the same pooled D_hat (from fA and fB when the
    plan has a B set, else fA alone) so indices are comparable across inputs.
    Negative D_i_hat values, possible at small N for near-zero indices, are
    reported as-is.
    """
    if plan.kind != kind:
        raise ValueError(f"plan was built for {plan.kind.value!r}, not {kind.value!r}")
    _, d_hat = estimate_mean_and_variance(plan.f_a, plan.f_b)

    f0 = None
    f0_source = plan.f0_source
    if kind == EstimatorKind.ORACLE:
        if model.analytic_f0 is not None:
            f0 = model.analytic_f0
            f0_source = "analytic"
        elif plan.f_c is not None:
            f0 = float(plan.f_c.mean())
            f0_source = "estimated"
        else:
            raise IncompatibleModelError(
                "oracle estimator needs an f0 source (analytic or pre-estimated)"
            )

    share = plan.eval_count / plan.d
    out = []
    for i in range(plan.d):
        if kind == EstimatorKind.SOBOL:
            d_i = estimate_sobol_original(plan.f_a, plan.f_ab[i])
        elif kind == EstimatorKind.SK:
            d_i = estimate_sk(plan.f_a, plan.f_b, plan.f_ab[i])
        elif kind == EstimatorKind.OWEN:
            d_i = estimate_owen(plan.f_a, plan.f_b, plan.f_ab[i], plan.f_ca[i])
        elif kind == EstimatorKind.ORACLE:
            d_i = estimate_oracle(plan.f_a, plan.f_b, plan.f_ab[i], f0)
        elif kind == EstimatorKind.DLR:
            d_i = estimate_dlr(plan.x_a[:, i], plan.f_a, plan.bins)
        else:  # pragma: no cover - enum is closed
            raise ValueError(f"unknown estimator kind {kind!r}")
        out.append(
            IndexEstimate(
                kind=kind,
                input=i + 1,
                d_i_hat=d_i,
                d_hat=d_hat,
                s_i_hat=d_i / d_hat,
                n=plan.n,
                eval_count_share=share,
                f0_source=f0_source,
            )
        )
    return out
