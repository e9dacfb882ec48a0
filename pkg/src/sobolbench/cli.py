"""Command-line front end: single-run estimates, benchmarks, plot data.

Three subcommands:

  estimate   print S_i_hat for one (test, estimators, sampler, N) run
  bench      run a config-file benchmark, write records.csv / rates.csv
  plotdata   turn records.csv into whitespace-delimited plot files

Exit codes: 0 success, 2 usage or config error, 3 estimator/model
incompatibility, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .estimators import EstimatorKind, IncompatibleModelError, build_plan, estimate_main_index
from .harness import (
    DEFAULT_MASTER_SEED,
    BenchmarkConfig,
    ConvergenceRecord,
    fit_rate,
    group_records,
    resolve_threads,
    run_benchmark,
)
from .models import TEST_CASE_NAMES, build
from .sampling import SamplerSpec

RECORDS_HEADER = [
    "test",
    "estimator",
    "sampler",
    "input",
    "N",
    "n_cpu_actual",
    "n_cpu_table1",
    "rmse",
    "mean_estimate",
    "analytic",
    "K",
]

RATES_HEADER = [
    "test",
    "estimator",
    "sampler",
    "input",
    "axis",
    "alpha",
    "c",
    "r2",
    "n_points",
    "window",
]

_CONFIG_KEYS = (
    "test",
    "estimators",
    "sampler",
    "p_min",
    "p_max",
    "K",
    "master_seed",
    "bin_override",
    "fit_window",
)
_REQUIRED_KEYS = ("test", "estimators", "sampler", "p_min", "p_max")


def _parse_estimator_list(text: str) -> tuple[EstimatorKind, ...]:
    kinds = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            kinds.append(EstimatorKind(tok))
        except ValueError:
            valid = ", ".join(k.value for k in EstimatorKind)
            raise ValueError(f"unknown estimator {tok!r} (valid: {valid})")
    if not kinds:
        raise ValueError("estimator list is empty")
    return tuple(kinds)


def parse_config(text: str) -> BenchmarkConfig:
    """Parse the flat key=value benchmark config format.

    One key per line, '#' starts a comment, values after the first '='.
    Keys: test, estimators (comma-separated), sampler, p_min, p_max, K,
    master_seed, bin_override, fit_window.  Errors carry line numbers.
    """
    seen: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "k":
            key = "K"
        if key not in _CONFIG_KEYS:
            raise ValueError(
                f"config line {lineno}: unknown key {key!r} (valid: {', '.join(_CONFIG_KEYS)})"
            )
        if key in seen:
            raise ValueError(f"config line {lineno}: duplicate key {key!r}")
        if not value:
            raise ValueError(f"config line {lineno}: empty value for {key!r}")
        seen[key] = (lineno, value)

    for key in _REQUIRED_KEYS:
        if key not in seen:
            raise ValueError(f"config: missing required key {key!r}")

    def _int(key: str) -> int:
        lineno, value = seen[key]
        try:
            return int(value)
        except ValueError:
            raise ValueError(f"config line {lineno}: {key} must be an integer, got {value!r}")

    lineno, value = seen["test"]
    if value not in TEST_CASE_NAMES:
        raise ValueError(
            f"config line {lineno}: unknown test {value!r} (valid: {', '.join(TEST_CASE_NAMES)})"
        )
    test = value

    lineno, value = seen["estimators"]
    try:
        estimators = _parse_estimator_list(value)
    except ValueError as exc:
        raise ValueError(f"config line {lineno}: {exc}")

    kwargs = {
        "test": test,
        "estimators": estimators,
        "sampler": seen["sampler"][1],
        "p_min": _int("p_min"),
        "p_max": _int("p_max"),
    }
    if "K" in seen:
        kwargs["k"] = _int("K")
    if "master_seed" in seen:
        kwargs["master_seed"] = _int("master_seed")
    if "bin_override" in seen and seen["bin_override"][1].lower() != "none":
        kwargs["bin_override"] = _int("bin_override")
    if "fit_window" in seen:
        kwargs["fit_window"] = seen["fit_window"][1]
    return BenchmarkConfig(**kwargs)


def _fmt(x: float) -> str:
    # str() of a Python float is the shortest round-trip repr: locale-free
    # and stable across runs, which keeps records.csv byte-identical.
    return str(float(x))


def cmd_estimate(args: argparse.Namespace) -> int:
    model = build(args.test)
    kinds = _parse_estimator_list(args.estimators)
    spec = SamplerSpec(kind=args.sampler, seed=args.seed, run_index=args.run_index)

    print(f"test {model.name} (d={model.d}), sampler {args.sampler}, N={args.n}")
    any_negative = False
    for kind in kinds:
        plan = build_plan(model, kind, args.n, spec, bin_count=args.bins)
        estimates = estimate_main_index(kind, plan, model)
        print(f"\nestimator {kind.value}: {plan.eval_count} model evaluations")
        if kind is EstimatorKind.ORACLE:
            print(f"  (f0 source: {plan.f0_source})")
        print(f"  {'input':>5}  {'S_hat':>12}  {'analytic':>12}  {'|error|':>12}")
        for est in estimates:
            if model.analytic_main is not None:
                ref = model.analytic_main[est.input - 1]
                ref_s = f"{ref:12.6f}"
                err_s = f"{abs(est.s_i_hat - ref):12.6f}"
            else:
                ref_s, err_s = f"{'n/a':>12}", f"{'n/a':>12}"
            mark = ""
            if est.s_i_hat < 0.0:
                mark = "  *"
                any_negative = True
            print(f"  {est.input:>5}  {est.s_i_hat:12.6f}  {ref_s}  {err_s}{mark}")
    if any_negative:
        print("\n  * negative estimate: statistical fluctuation around a small index")
    return 0


def write_records_csv(path: Path, records: Sequence[ConvergenceRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORDS_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.test,
                    r.estimator.value,
                    r.sampler,
                    r.input,
                    r.n,
                    r.n_cpu_actual,
                    r.n_cpu_table1,
                    _fmt(r.rmse),
                    _fmt(r.mean_estimate),
                    _fmt(r.analytic),
                    r.k,
                ]
            )


def write_rates_csv(
    path: Path, records: Sequence[ConvergenceRecord], window: str
) -> int:
    """Fit every (estimator, input) group on both axes; returns rows written.

    Groups whose ladder leaves fewer than 4 usable points are skipped rather
    than failing the whole run.
    """
    groups = group_records(records)
    rows = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RATES_HEADER)
        for (kind, input_index) in sorted(groups, key=lambda g: (g[0].value, g[1])):
            group = groups[(kind, input_index)]
            for axis in ("N", "N_CPU"):
                try:
                    fit = fit_rate(group, axis=axis, window=window)
                except ValueError:
                    continue
                writer.writerow(
                    [
                        group[0].test,
                        kind.value,
                        group[0].sampler,
                        input_index,
                        axis,
                        _fmt(fit.alpha),
                        _fmt(fit.c),
                        _fmt(fit.r2),
                        fit.n_points,
                        fit.window,
                    ]
                )
                rows += 1
    return rows


def cmd_bench(args: argparse.Namespace) -> int:
    config_path = Path(args.config)
    config_bytes = config_path.read_bytes()
    cfg = parse_config(config_bytes.decode())
    if args.fit_window is not None:
        cfg = BenchmarkConfig(
            test=cfg.test,
            estimators=cfg.estimators,
            sampler=cfg.sampler,
            p_min=cfg.p_min,
            p_max=cfg.p_max,
            k=cfg.k,
            master_seed=cfg.master_seed,
            bin_override=cfg.bin_override,
            fit_window=args.fit_window,
        )
    threads = resolve_threads()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    records = run_benchmark(cfg, threads=threads)
    records_path = out_dir / "records.csv"
    rates_path = out_dir / "rates.csv"
    write_records_csv(records_path, records)
    n_rates = write_rates_csv(rates_path, records, cfg.fit_window)

    manifest = {
        "version": __version__,
        "generated": datetime.now(timezone.utc).isoformat(),
        "config_path": str(config_path),
        "config_sha256": hashlib.sha256(config_bytes).hexdigest(),
        "config": {
            "test": cfg.test.value,
            "estimators": [k.value for k in cfg.estimators],
            "sampler": cfg.sampler,
            "p_min": cfg.p_min,
            "p_max": cfg.p_max,
            "K": cfg.k,
            "master_seed": cfg.master_seed,
            "bin_override": cfg.bin_override,
            "fit_window": cfg.fit_window,
        },
        "threads": threads,
        "artifacts": {"records": records_path.name, "rates": rates_path.name},
    }
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    print(f"wrote {records_path} ({len(records)} records)")
    print(f"wrote {rates_path} ({n_rates} fits)")
    print(f"wrote {manifest_path}")
    return 0


def _read_records_csv(path: Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in RECORDS_HEADER if c not in header]
        if missing:
            raise ValueError(f"{path}: missing columns: {', '.join(missing)}")
        return list(reader)


def cmd_plotdata(args: argparse.Namespace) -> int:
    rows = _read_records_csv(Path(args.records))
    if not rows:
        raise ValueError(f"{args.records}: no records")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    by_group: dict[tuple[str, int], list[dict[str, str]]] = {}
    for row in rows:
        by_group.setdefault((row["test"], int(row["input"])), []).append(row)

    written = []
    for (test, input_index) in sorted(by_group):
        group = by_group[(test, input_index)]
        estimators = sorted({row["estimator"] for row in group})
        cell: dict[tuple[str, int], dict[str, str]] = {}
        ladder: set[int] = set()
        for row in group:
            n = int(row["N"])
            ladder.add(n)
            cell[(row["estimator"], n)] = row
        ns = sorted(ladder)
        for est in estimators:
            missing = [n for n in ns if (est, n) not in cell]
            if missing:
                raise ValueError(
                    f"records are not a complete grid: {test} input {input_index} "
                    f"estimator {est} lacks N={missing[0]}"
                )

        path = out_dir / f"{test}_i{input_index}_{args.axis}.dat"
        lines = []
        if args.axis == "N":
            # shared abscissa: N, then one RMSE column per estimator
            lines.append("# N " + " ".join(f"rmse_{e}" for e in estimators))
            for n in ns:
                vals = [cell[(e, n)]["rmse"] for e in estimators]
                if any(float(v) <= 0.0 for v in vals):
                    continue
                lines.append(" ".join([str(n)] + vals))
        else:
            # per-estimator evaluation counts differ, so each estimator
            # carries its own abscissa column: (n_cpu_<e>, rmse_<e>) pairs
            lines.append(
                "# " + " ".join(f"n_cpu_{e} rmse_{e}" for e in estimators)
            )
            for n in ns:
                fields = []
                skip = False
                for e in estimators:
                    row = cell[(e, n)]
                    if float(row["rmse"]) <= 0.0:
                        skip = True
                    fields.extend([row["n_cpu_actual"], row["rmse"]])
                if not skip:
                    lines.append(" ".join(fields))
        path.write_text("\n".join(lines) + "\n")
        written.append(path)

    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sobolbench",
        description="Benchmark Monte Carlo / quasi-Monte Carlo estimators "
        "of Sobol' main-effect sensitivity indices.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="print index estimates for one run")
    p_est.add_argument("--test", required=True, choices=TEST_CASE_NAMES)
    p_est.add_argument(
        "--estimators",
        required=True,
        help="comma-separated subset of: " + ", ".join(k.value for k in EstimatorKind),
    )
    p_est.add_argument("--sampler", required=True, choices=["MC", "QMC"])
    p_est.add_argument("--n", required=True, type=int, help="sample count N")
    p_est.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED)
    p_est.add_argument("--run-index", type=int, default=0)
    p_est.add_argument("--bins", type=int, default=None, help="bin count override (dlr only)")
    p_est.set_defaults(func=cmd_estimate)

    p_bench = sub.add_parser("bench", help="run a benchmark config, write CSV outputs")
    p_bench.add_argument("--config", required=True, help="key=value config file")
    p_bench.add_argument("--out", required=True, help="output directory")
    p_bench.add_argument("--fit-window", choices=["upper", "full"], default=None)
    p_bench.set_defaults(func=cmd_bench)

    p_plot = sub.add_parser("plotdata", help="records.csv -> plot-ready .dat files")
    p_plot.add_argument("records", help="records.csv written by bench")
    p_plot.add_argument("--axis", choices=["N", "N_CPU"], default="N")
    p_plot.add_argument("--out", default=".", help="output directory")
    p_plot.set_defaults(func=cmd_plotdata)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return code
    try:
        return args.func(args)
    except IncompatibleModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
