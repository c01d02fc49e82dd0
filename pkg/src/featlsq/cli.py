"""Command-line entry points.

Verbs:
    run          one experiment from a config file
    suite        a family of experiments from a suite config file
    rmt          Monte Carlo block statistics of Haar orthogonal matrices
    sweep-kappa  condition numbers over a (basis size, overlap) grid
    fd-ref       generate and cache a finite-difference wave reference

Every verb exits nonzero when a run fails or a monitored bound is violated.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from .config import load_experiment, load_suite
from .errors import ConfigurationError, RunError
from .fdwave import fd_wave_reference
from .runner import (SolveReport, kappa_overlap_sweep, rmt_report, run_experiment,
                     run_suite)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="config file path")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seeds", help="comma-separated seed list override")
    parser.add_argument("--eval-stride", type=int,
                        help="evaluate test error every N iterations")


def _parse_seeds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigurationError(f"bad seed list {text!r}")


def _apply_overrides(cfg, args):
    updates = {}
    if args.seeds:
        updates["seeds"] = _parse_seeds(args.seeds)
    if args.eval_stride:
        updates["eval_stride"] = args.eval_stride
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _print_report(report: SolveReport) -> None:
    print(f"{report.label}: e_L1 median {report.error_median:.3e} "
          f"range {report.error_range:.3e}, "
          f"solve time {report.time_mean:.2f}s ± {report.time_std:.2f}s")
    cond = report.condition
    named = [("κ(M)", cond.kappa_m), ("κ(M̂)", cond.kappa_mhat),
             ("κ(M̂S⁻¹)", cond.kappa_q),
             ("κ(MᵀM)", cond.kappa_normal),
             ("κ(A_AS⁻¹A)", cond.kappa_as)]
    parts = [f"{name} {est.value:.3g}" + (" (lanczos)" if est.method == "lanczos" else "")
             for name, est in named if est is not None]
    if parts:
        print("  " + ", ".join(parts))
    if report.run_dir:
        print(f"  artifacts: {report.run_dir}")


def _cmd_run(args) -> int:
    cfg = _apply_overrides(load_experiment(args.config), args)
    report = run_experiment(cfg, args.out)
    _print_report(report)
    return 0


def _cmd_suite(args) -> int:
    suite = load_suite(args.config)
    base = _apply_overrides(suite.base, args)
    suite = dataclasses.replace(suite, base=base)
    result = run_suite(suite, args.out, workers=args.workers)
    for report in result.reports:
        if report is not None:
            _print_report(report)
    if result.failures:
        for label, message in result.failures:
            print(f"FAILED {label}: {message}", file=sys.stderr)
        return 1
    print(f"suite artifacts: {result.suite_dir}")
    return 0


def _cmd_rmt(args) -> int:
    stats = rmt_report(args.out, args.dim, args.rows, args.cols, args.trials,
                       args.seed)
    slack = 1.0 + 3.0 / np.sqrt(stats.trials)
    ok = stats.all_bounds_hold(slack)
    fro_ratio = stats.mean_block_fro / stats.block_fro_expected
    print(f"n={stats.dim} block {stats.block_rows}x{stats.block_cols}, "
          f"{stats.trials} trials")
    print(f"  mean cross frobenius {stats.mean_cross_fro:.4f} "
          f"(bound {stats.cross_fro_bound:.4f})")
    print(f"  mean block frobenius {stats.mean_block_fro:.4f} "
          f"(sqrt of exact mean square {stats.block_fro_expected:.4f})")
    print(f"  mean block spectral {stats.mean_block_spectral:.4f} "
          f"(bound {stats.block_spectral_bound:.4f})")
    print(f"  mean cross spectral {stats.mean_cross_spectral:.4f} "
          f"(bound {stats.cross_spectral_bound:.4f})")
    print(f"  condition estimates: {stats.kappa_estimate_squared:.3f} "
          f"(squared coupling), {stats.kappa_estimate_linear:.3f} (linear)")
    if not ok or abs(fro_ratio - 1.0) > 0.05:
        print("bound violation detected", file=sys.stderr)
        return 1
    return 0


def _cmd_sweep_kappa(args) -> int:
    rows = kappa_overlap_sweep(args.out, seed=args.seed)
    for features, delta, kappa_m, kappa_q in rows:
        print(f"K={features:>3} δ={delta:<5g} κ(M)={kappa_m:.3g} "
              f"κ(M̂S⁻¹)={kappa_q:.3g}")
    return 0


def _cmd_fd_ref(args) -> int:
    reference = fd_wave_reference(args.wavelength, args.speed,
                                  args.points_per_wavelength)
    os.makedirs(args.out, exist_ok=True)
    base = os.path.join(
        args.out,
        f"fd-wave-wl{args.wavelength:g}-c{args.speed:g}"
        f"-ppw{args.points_per_wavelength}")
    reference.save(base)
    print(f"saved {base}.json (+.bin), relative energy drift "
          f"{reference.energy_drift:.3e}")
    if reference.energy_drift > 0.01:
        print("energy drift above 1%", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="featlsq",
        description="domain-decomposed random-feature least-squares PDE solver")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    _add_common(p_run)
    p_run.set_defaults(fn=_cmd_run)

    p_suite = sub.add_parser("suite", help="run a suite config")
    _add_common(p_suite)
    p_suite.add_argument("--workers", type=int, default=1,
                         help="parallel cell processes")
    p_suite.set_defaults(fn=_cmd_suite)

    p_rmt = sub.add_parser("rmt", help="random-matrix block statistics")
    p_rmt.add_argument("--out", help="directory for rmt.csv")
    p_rmt.add_argument("--dim", type=int, default=100)
    p_rmt.add_argument("--rows", type=int, default=10)
    p_rmt.add_argument("--cols", type=int, default=5)
    p_rmt.add_argument("--trials", type=int, default=1000)
    p_rmt.add_argument("--seed", type=int, default=0)
    p_rmt.set_defaults(fn=_cmd_rmt)

    p_sweep = sub.add_parser("sweep-kappa",
                             help="condition numbers over a (K, overlap) grid")
    p_sweep.add_argument("--out", help="directory for kappa-sweep.csv")
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.set_defaults(fn=_cmd_sweep_kappa)

    p_ref = sub.add_parser("fd-ref", help="generate a wave reference field")
    p_ref.add_argument("--wavelength", type=float, required=True)
    p_ref.add_argument("--speed", type=float, default=1.0)
    p_ref.add_argument("--points-per-wavelength", type=int, default=10)
    p_ref.add_argument("--out", required=True)
    p_ref.set_defaults(fn=_cmd_fd_ref)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigurationError, RunError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
