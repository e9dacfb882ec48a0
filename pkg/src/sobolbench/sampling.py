"""Point-set generation and distribution transforms.

Two samplers are provided: pseudo-random (``MC``, PCG64) and the Sobol'
low-discrepancy sequence (``QMC``, Gray-code construction over the bundled
direction-number table).  Unit samples are mapped to model space either
columnwise through independent marginals or jointly through a Gaussian
covariance via Cholesky factorization.

Generator conventions
---------------------
* The all-zeros Sobol' element is skipped: sequence index 1 is the first
  returned point, so every returned coordinate is strictly positive and the
  inverse-CDF transforms are well defined.
* A QMC run with ``run_index = k`` returns the contiguous block of sequence
  elements with raw indices ``[1 + k*n, 1 + (k+1)*n)``; distinct runs use
  disjoint parts of the sequence.
* An MC run uses ``numpy.random.default_rng(seed)`` and draws the ``n x dims``
  matrix row by row; per-run seeds are derived with :func:`mix_seed`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.special import ndtr, ndtri

from ._directions import MAX_DIM, MAXBIT, direction_vectors

__all__ = [
    "UnitPointSet",
    "SamplerSpec",
    "Uniform",
    "Normal",
    "Lognormal",
    "LOGNORMAL_INTERPRETATIONS",
    "CovarianceSpec",
    "generate_uniform",
    "mix_seed",
    "inverse_normal_cdf",
    "normal_cdf",
    "cholesky_lower",
    "transform_independent",
    "transform_correlated_normal",
]

_DIRECTION_CACHE: dict[int, np.ndarray] = {}


@dataclass(frozen=True)
class UnitPointSet:
    """n points in the half-open unit cube [0,1)^dims."""

    n: int
    dims: int
    values: np.ndarray

    def __post_init__(self):
        if self.n <= 0 or self.dims <= 0:
            raise ValueError("n and dims must be positive")
        if self.values.shape != (self.n, self.dims):
            raise ValueError("values shape does not match (n, dims)")


@dataclass(frozen=True)
class SamplerSpec:
    """Which stream of points to draw.

    kind      : "MC" or "QMC"
    seed      : 64-bit seed (MC only)
    run_index : block selector; QMC run k uses a disjoint slice of the
                sequence, MC runs derive per-run seeds from (seed, k)
    """

    kind: str
    seed: int = 0
    run_index: int = 0

    def __post_init__(self):
        if self.kind not in ("MC", "QMC"):
            raise ValueError(f"unknown sampler kind {self.kind!r} (use MC or QMC)")
        if self.run_index < 0:
            raise ValueError("run_index must be nonnegative")


def mix_seed(master_seed: int, run_index: int) -> int:
    """Derive the per-run 64-bit seed as output ``run_index`` of a splitmix64
    stream started at ``master_seed``."""
    mask = 0xFFFFFFFFFFFFFFFF
    z = (master_seed + (run_index + 1) * 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    return z ^ (z >> 31)


def _sobol_raw(start: int, n: int, dims: int) -> np.ndarray:
    """Sobol' elements with raw sequence indices [start, start + n).

    Direct Gray-code construction: element i is the XOR of the direction
    vectors selected by the set bits of gray(i) = i ^ (i >> 1).
    """
    if start + n > 1 << MAXBIT:
        raise ValueError("sequence index exceeds the 2^32 generator period")
    if dims not in _DIRECTION_CACHE:
        _DIRECTION_CACHE[dims] = direction_vectors(dims)
    V = _DIRECTION_CACHE[dims]
    idx = np.arange(start, start + n, dtype=np.uint64)
    gray = idx ^ (idx >> np.uint64(1))
    out = np.zeros((n, dims), dtype=np.uint32)
    for k in range(MAXBIT):
        mask = ((gray >> np.uint64(k)) & np.uint64(1)).astype(bool)
        if mask.any():
            out[mask] ^= V[k, :]
    return out * np.float64(2.0**-MAXBIT)


def generate_uniform(spec: SamplerSpec, n: int, dims: int) -> UnitPointSet:
    """Draw n points in [0,1)^dims from the stream described by ``spec``.

    QMC requires n to be a power of two and dims within the bundled
    direction-number table; results are deterministic functions of the spec.
    """
    if n <= 0 or dims <= 0:
        raise ValueError("n and dims must be positive")
    if dims > MAX_DIM:
        raise ValueError(
            f"dims={dims} exceeds the bundled direction-number table (max {MAX_DIM})"
        )
    if spec.kind == "QMC":
        if n & (n - 1) != 0:
            raise ValueError(f"QMC sample count must be a power of two, got n={n}")
        values = _sobol_raw(1 + spec.run_index * n, n, dims)
    else:
        rng = np.random.default_rng(mix_seed(spec.seed, spec.run_index))
        values = rng.random((n, dims))
    return UnitPointSet(n=n, dims=dims, values=values)


def inverse_normal_cdf(u):
    """Standard normal quantile z with Phi(z) = u, for u strictly inside (0,1)."""
    arr = np.asarray(u, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("inverse_normal_cdf requires 0 < u < 1")
    z = ndtri(arr)
    if np.isscalar(u) or arr.ndim == 0:
        return float(z)
    return z


def normal_cdf(z):
    """Standard normal CDF (round-trip companion of inverse_normal_cdf)."""
    return ndtr(np.asarray(z, dtype=float))


# ---------------------------------------------------------------------------
# Marginals

# How a Lognormal(p1, p2) parameter pair is read:
#   "underlying" : p1, p2 are mean and sd of ln x          x = exp(p1 + p2 z)
#   "median"     : p1 is the median of x, p2 the sd of ln x x = exp(ln p1 + p2 z)
#   "moments"    : p1, p2 are mean and sd of x itself
LOGNORMAL_INTERPRETATIONS = ("underlying", "median", "moments")


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("Uniform requires b > a")

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        return self.a + (self.b - self.a) * u


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("Normal requires sigma > 0")

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        return self.mu + self.sigma * ndtri(u)


@dataclass(frozen=True)
class Lognormal:
    """Lognormal marginal with an explicit reading of its two parameters.

    The interpretation flag exists because published parameter lists for
    lognormal inputs are routinely ambiguous; see
    :data:`LOGNORMAL_INTERPRETATIONS` for the three supported readings.
    """

    p1: float
    p2: float
    interpretation: str = "median"

    def __post_init__(self):
        if self.interpretation not in LOGNORMAL_INTERPRETATIONS:
            raise ValueError(
                f"unknown lognormal interpretation {self.interpretation!r}; "
                f"expected one of {LOGNORMAL_INTERPRETATIONS}"
            )
        if not self.p2 > 0:
            raise ValueError("Lognormal requires p2 > 0")
        if self.interpretation in ("median", "moments") and not self.p1 > 0:
            raise ValueError(f"Lognormal({self.interpretation}) requires p1 > 0")

    def log_params(self) -> tuple[float, float]:
        """(mu, sigma) of the underlying normal ln x."""
        if self.interpretation == "underlying":
            return self.p1, self.p2
        if self.interpretation == "median":
            return float(np.log(self.p1)), self.p2
        # moments: match E[x] = p1 and SD[x] = p2
        sigma2 = float(np.log1p((self.p2 / self.p1) ** 2))
        mu = float(np.log(self.p1)) - 0.5 * sigma2
        return mu, float(np.sqrt(sigma2))

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        mu, sigma = self.log_params()
        return np.exp(mu + sigma * ndtri(u))

    def moments(self) -> tuple[float, float]:
        """Exact (E[x], E[x^2]) from the underlying normal parameters."""
        mu, sigma = self.log_params()
        e1 = float(np.exp(mu + 0.5 * sigma**2))
        e2 = float(np.exp(2.0 * mu + 2.0 * sigma**2))
        return e1, e2


Marginal = Union[Uniform, Normal, Lognormal]


@dataclass(frozen=True)
class CovarianceSpec:
    """Mean vector and covariance matrix of a jointly Gaussian input block."""

    mean: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        matrix = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "matrix", matrix)
        d = mean.shape[0]
        if matrix.shape != (d, d):
            raise ValueError("covariance matrix shape does not match mean length")
        if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-12):
            raise ValueError("covariance matrix must be symmetric")

    @property
    def d(self) -> int:
        return self.mean.shape[0]


def cholesky_lower(cov: CovarianceSpec) -> np.ndarray:
    """Lower-triangular L with L @ L.T equal to the covariance matrix.

    Rolled out by hand (vs. calling a library routine) so that a
    non-positive-definite matrix is rejected naming the failing pivot,
    which is the actionable diagnostic when a user mistypes a covariance.
    """
    C = cov.matrix
    d = cov.d
    L = np.zeros_like(C)
    for j in range(d):
        pivot = C[j, j] - np.dot(L[j, :j], L[j, :j])
        # Tolerance relative to the largest diagonal entry guards pure
        # round-off on valid matrices without accepting indefinite ones.
        if pivot <= 1e-14 * max(C.diagonal().max(), 1.0):
            raise ValueError(
                f"covariance matrix is not positive definite (pivot {j + 1})"
            )
        L[j, j] = np.sqrt(pivot)
        for i in range(j + 1, d):
            L[i, j] = (C[i, j] - np.dot(L[i, :j], L[j, :j])) / L[j, j]
    return L


def transform_independent(u: UnitPointSet, marginals: Sequence[Marginal]) -> np.ndarray:
    """Map unit samples to model space columnwise through the marginals."""
    if u.dims != len(marginals):
        raise ValueError(
            f"point set has {u.dims} dims but {len(marginals)} marginals given"
        )
    out = np.empty_like(u.values)
    for j, marg in enumerate(marginals):
        out[:, j] = marg.from_unit(u.values[:, j])
    return out


def transform_correlated_normal(u: UnitPointSet, cov: CovarianceSpec) -> np.ndarray:
    """Map unit samples to x = mu + L z with z the inverse-CDF standard normals."""
    if u.dims != cov.d:
        raise ValueError(f"point set has {u.dims} dims but covariance is {cov.d}-d")
    L = cholesky_lower(cov)
    z = ndtri(u.values)
    return cov.mean + z @ L.T
