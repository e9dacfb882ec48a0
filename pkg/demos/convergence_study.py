"""
A small convergence study
=========================

Run three estimators on the four-input linear model over a ladder of
sample sizes, fit the observed convergence rate of each error curve, and
write plot-ready text files (one per input, gnuplot/np.loadtxt friendly).
"""

import os

import numpy as np

from sobolbench import (
    BenchmarkConfig,
    fit_rate,
    group_records,
    run_benchmark,
)

# N = 2^8 .. 2^13, each repeated over K = 10 independent runs; RMSE is
# taken across the runs against the known analytic indices
config = BenchmarkConfig(
    test="Linear4",
    estimators=("sobol", "sk", "dlr"),
    sampler="QMC",
    p_min=8,
    p_max=13,
)
records = run_benchmark(config)
curves = group_records(records)

# fitted rmse ~ c * N^(-alpha); with a low-discrepancy sampler all three
# curves decay faster than N^(-1/2), but the plain product estimator pays
# for its uncancelled mean term with an error level roughly an order of
# magnitude above the difference-based ones at every N
print(f"{config.test.value}, sampler {config.sampler}, K={config.k}")
print(f"{'estimator':>9s} {'input':>5s} {'alpha':>7s} {'r^2':>7s}")
for (kind, i) in sorted(curves, key=lambda key: (key[0].value, key[1])):
    fit = fit_rate(curves[(kind, i)], axis="N", window="upper")
    print(f"{kind.value:>9s} {i:5d} {fit.alpha:7.3f} {fit.r2:7.4f}")

# one file per input: a shared N column, then one rmse column per
# estimator, e.g.  plot "linear4_i1.dat" using 1:2 with lines
kinds = sorted({kind for (kind, _) in curves}, key=lambda k: k.value)
out_dir = os.path.dirname(os.path.abspath(__file__))
for i in range(1, 5):
    ns = np.array([r.n for r in curves[(kinds[0], i)]])
    columns = [ns] + [
        np.array([r.rmse for r in curves[(kind, i)]]) for kind in kinds
    ]
    path = os.path.join(out_dir, f"linear4_i{i}.dat")
    np.savetxt(
        path,
        np.column_stack(columns),
        header="N " + " ".join(f"rmse_{kind.value}" for kind in kinds),
    )
    print(f"wrote {os.path.relpath(path)}")
