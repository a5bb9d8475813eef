"""Command line entry point: ``hartree-wkb {run,sweep,check}``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict

from .config import load_config
from .errors import InstabilityError, KernelHypothesisError, LatticeError
from .harness import BOUND_SLACK, emit_report, run_case_detailed, run_sweep
from .exact_solver import L2_DRIFT_LIMIT
from .property_suites import kernel_suite, wiener_suite, wkb_suite


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    record, detail = run_case_detailed(cfg, args.epsilon)
    out = asdict(record)
    out.update(points=detail.points, dt=detail.dt, error_wiener=detail.error_wiener)
    print(json.dumps({k: (v if not isinstance(v, float) or math.isfinite(v) else repr(v)) for k, v in out.items()},
                     indent=2))
    ok = record.l2_drift <= L2_DRIFT_LIMIT and (math.isnan(record.bound_ratio) or record.bound_ratio <= 1 + BOUND_SLACK)
    return 0 if ok else 1


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config, args.output)
    report = run_sweep(cfg, args.workers)
    paths = emit_report(report, cfg.output_dir)
    for r in report.records:
        print(f"eps={r.epsilon:<10g} sup_error={r.sup_error:.6e} yr_W={r.yr_wiener:.6e} "
              f"ratio={r.bound_ratio:.3e} drift={r.l2_drift:.1e}")
    if report.fit:
        print(f"beta_hat = {report.fit.beta:.4f} +- {report.fit.stderr:.4f} "
              f"(theory {report.beta_theory:g}, window [{report.rate_window[0]:g}, {report.rate_window[1]:g}])")
    for note in report.notes + report.failures:
        print(f"note: {note}")
    for name, flag in report.flags.items():
        print(f"{'PASS' if flag else 'FAIL'} {name}")
    print(f"reports written to {paths['csv'].parent}")
    return 0 if report.passed else 1


def _cmd_check(args) -> int:
    cfg = load_config(args.config)
    eps = min(cfg.epsilons) if args.suite == "kernel" else max(cfg.epsilons)
    grid = cfg.grid_for(eps)
    if args.suite == "kernel":
        try:
            results = kernel_suite(cfg.kernel, grid, args.n)
        except KernelHypothesisError as exc:
            print(f"FAIL kernel hypotheses: {exc}")
            return 1
    elif args.suite == "wiener":
        results = wiener_suite(args.n)
    else:
        results = wkb_suite(cfg.modes, cfg.kernel, grid, eps, cfg.alpha, times=cfg.snapshot_times)
    for r in results:
        print(r.line())
        for note in r.notes:
            print(f"  {note}")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hartree-wkb", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="single eps case")
    run.add_argument("--config", required=True)
    run.add_argument("--epsilon", type=float, required=True)
    run.set_defaults(func=_cmd_run)

    sweep = sub.add_parser("sweep", help="eps sweep and rate fit")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--workers", type=int, default=None)
    sweep.add_argument("--output", default=None, help="override output_dir")
    sweep.set_defaults(func=_cmd_sweep)

    check = sub.add_parser("check", help="hypothesis and property suites")
    check.add_argument("--config", required=True)
    check.add_argument("--suite", choices=("kernel", "wiener", "wkb"), required=True)
    check.add_argument("-n", type=int, default=100, help="randomised checks per property")
    check.set_defaults(func=_cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InstabilityError, LatticeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
