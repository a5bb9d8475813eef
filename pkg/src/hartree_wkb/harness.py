"""
eps-sweeps of the exact-vs-WKB error, convergence-rate fits and reports.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import stats

from .config import SweepConfig
from .diagnostics import residual_terms, sup_error, wiener_norm_samples, yr_bound_check
from .errors import InstabilityError, InsufficientPointsError
from .exact_solver import L2_DRIFT_LIMIT, SolverConfig, propagate
from .wkb_builder import EPS_MODULATED, assemble_u_app, build_amplitudes, build_initial_data

log = logging.getLogger(__name__)

BOUND_SLACK = 1e-6
CSV_COLUMNS = ("epsilon", "sup_error", "yr_wiener", "bound_ratio", "l2_drift", "runtime_s")


def beta_theory(alpha: float) -> float:
    """Error exponent: 1 for alpha = 1 or alpha >= 2, alpha - 1 in between."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if alpha == 1 or alpha >= 2:
        return 1.0
    return alpha - 1.0


@dataclass
class CaseRecord:
    epsilon: float
    sup_error: float
    yr_wiener: float
    bound_ratio: float
    l2_drift: float
    runtime_s: float


@dataclass
class CaseDetail:
    """Per-case diagnostics that do not go to the CSV."""

    points: int
    dt: float
    errors: list[float]
    error_wiener: float


def solver_config(cfg: SweepConfig, eps: float, snapshot_times: Optional[Sequence[float]] = None) -> SolverConfig:
    return SolverConfig(
        eps=eps,
        alpha=cfg.alpha,
        T=cfg.T,
        kernel=cfg.kernel,
        dt_initial=cfg.dt_initial,
        eta=cfg.eta,
        snapshot_times=tuple(cfg.snapshot_times if snapshot_times is None else snapshot_times),
    )


def run_case_detailed(cfg: SweepConfig, eps: float, snapshot_times: Optional[Sequence[float]] = None):
    start = time.perf_counter()
    grid = cfg.grid_for(eps)
    u0 = build_initial_data(cfg.modes, eps, grid)
    traj = propagate(solver_config(cfg, eps, snapshot_times), u0)

    errors, yr, ratios = [], [], []
    err_w = 0.0
    for t, u in traj.snapshots:
        A = build_amplitudes(cfg.modes, t, cfg.kernel, cfg.alpha, grid, cfg.variant, eps)
        u_app = assemble_u_app(A, cfg.modes, t, eps)
        errors.append(sup_error(u, u_app))
        err_w = max(err_w, wiener_norm_samples(grid, u.samples - u_app.samples))
        rep = residual_terms(A, cfg.modes, cfg.kernel, eps, cfg.alpha, t)
        yr.append(rep.norms["YR"])
        if cfg.modes.J >= 2:
            ratios.append(yr_bound_check(rep, A, cfg.modes, cfg.kernel, eps))
    runtime = time.perf_counter() - start
    record = CaseRecord(
        epsilon=eps,
        sup_error=max(errors),
        yr_wiener=max(yr),
        bound_ratio=max(ratios) if ratios else math.nan,
        l2_drift=traj.l2_drift,
        runtime_s=runtime if cfg.record_timings else math.nan,
    )
    detail = CaseDetail(grid.n, traj.dt, errors, err_w)
    log.info("eps=%g N=%d dt=%g sup_error=%.6e (%.2fs)", eps, grid.n, traj.dt, record.sup_error, runtime)
    return record, detail


def run_case(cfg: SweepConfig, eps: float, snapshot_times: Optional[Sequence[float]] = None) -> CaseRecord:
    """Exact solution vs u_app at the snapshot times for one eps."""
    return run_case_detailed(cfg, eps, snapshot_times)[0]


@dataclass(frozen=True)
class RateFit:
    beta: float
    stderr: float
    used: int
    dropped: int
    intercept: float


def fit_rate(records: Iterable[CaseRecord], eta: Optional[float] = None, floor_factor: float = 100.0) -> RateFit:
    """Least-squares slope of log(error) against log(eps).

    Points whose error is not positive, or below ``floor_factor * eta * eps^2``
    (the time-stepping tolerance) when ``eta`` is given, are dropped.
    """
    eps, err = [], []
    dropped = 0
    for r in records:
        floor = floor_factor * eta * r.epsilon**2 if eta is not None else 0.0
        if not (r.sup_error > 0 and r.sup_error >= floor and math.isfinite(r.sup_error)):
            dropped += 1
            continue
        eps.append(r.epsilon)
        err.append(r.sup_error)
    if len(eps) < 3:
        raise InsufficientPointsError(f"{len(eps)} usable points after dropping {dropped}; need 3")
    fit = stats.linregress(np.log(eps), np.log(err))
    return RateFit(float(fit.slope), float(fit.stderr), len(eps), dropped, float(fit.intercept))


@dataclass
class SweepReport:
    name: str
    alpha: float
    variant: str
    eta: float
    floor_factor: float
    records: list[CaseRecord]
    beta_theory: float
    rate_window: tuple[float, float]
    fit: Optional[RateFit] = None
    flags: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    details: list[CaseDetail] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return bool(self.flags) and all(self.flags.values()) and not self.failures


def evaluate_flags(report: SweepReport) -> dict:
    """Pass/fail flags recomputed from the records and the fit."""
    lo, hi = report.rate_window
    flags = {
        "fit_available": report.fit is not None,
        "rate_ok": report.fit is not None and lo <= report.fit.beta <= hi,
        "drift_ok": all(r.l2_drift <= L2_DRIFT_LIMIT for r in report.records),
        "bound_ok": all(
            math.isnan(r.bound_ratio) or r.bound_ratio <= 1 + BOUND_SLACK for r in report.records
        ),
    }
    return flags


def _case(args):
    cfg, eps = args
    try:
        return run_case_detailed(cfg, eps), None
    except (InstabilityError, FloatingPointError) as exc:
        return None, f"eps={eps!r}: {exc}"


def run_sweep(cfg: SweepConfig, workers: Optional[int] = None) -> SweepReport:
    """Run all eps cases (in parallel across eps), fit the rate and set flags."""
    workers = workers or cfg.workers
    jobs = [(cfg, eps) for eps in cfg.epsilons]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_case, jobs))
    else:
        results = [_case(job) for job in jobs]

    records, details, failures = [], [], []
    for res, err in results:
        if err is not None:
            failures.append(err)
            continue
        records.append(res[0])
        details.append(res[1])

    bt = beta_theory(cfg.alpha)
    report = SweepReport(
        name=cfg.name,
        alpha=cfg.alpha,
        variant=cfg.variant,
        eta=cfg.eta,
        floor_factor=cfg.floor_factor,
        records=records,
        beta_theory=bt,
        rate_window=(bt - cfg.rate_below, bt + cfg.rate_above),
        failures=failures,
        details=details,
    )
    try:
        report.fit = fit_rate(records, cfg.eta, cfg.floor_factor)
        if report.fit.dropped:
            report.notes.append(f"{report.fit.dropped} point(s) below the time-stepping floor were dropped")
        if report.fit.beta > bt + 0.25:
            report.notes.append("fitted rate exceeds the theoretical exponent (the estimate is an upper bound)")
    except InsufficientPointsError as exc:
        report.notes.append(f"insufficient points: {exc}")
    if cfg.variant == EPS_MODULATED:
        report.notes.append("eps-modulated amplitudes: expected exponent 1 for every alpha >= 1")
    report.flags = evaluate_flags(report)
    return report


def _fmt(v: float) -> str:
    return repr(float(v))


def write_records_csv(records: Sequence[CaseRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])


def read_records_csv(path: str | Path) -> list[CaseRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [CaseRecord(**{c: float(row[c]) for c in CSV_COLUMNS}) for row in rows]


def _json_float(v: float):
    return v if math.isfinite(v) else repr(v)


def summary_dict(report: SweepReport) -> dict:
    fit = asdict(report.fit) if report.fit else None
    return {
        "name": report.name,
        "alpha": report.alpha,
        "variant": report.variant,
        "eta": report.eta,
        "floor_factor": report.floor_factor,
        "beta_hat": fit["beta"] if fit else None,
        "beta_stderr": fit["stderr"] if fit else None,
        "points_used": fit["used"] if fit else 0,
        "points_dropped": fit["dropped"] if fit else 0,
        "beta_theory": report.beta_theory,
        "rate_window": [_json_float(v) for v in report.rate_window],
        "flags": report.flags,
        "passed": report.passed,
        "notes": report.notes,
        "failures": report.failures,
    }


def emit_report(report: SweepReport, outdir: str | Path) -> dict[str, Path]:
    """Write records.csv, summary.json and two-column log-log plot data."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": out / "records.csv",
        "summary": out / "summary.json",
        "error_plot": out / "error_loglog.dat",
        "yr_plot": out / "yr_loglog.dat",
    }
    write_records_csv(report.records, paths["csv"])
    with open(paths["summary"], "w") as fh:
        json.dump(summary_dict(report), fh, indent=2)
        fh.write("\n")
    for key, col in (("error_plot", "sup_error"), ("yr_plot", "yr_wiener")):
        with open(paths[key], "w") as fh:
            fh.write(f"# log10(epsilon) log10({col})\n")
            for r in report.records:
                v = getattr(r, col)
                if v > 0:
                    fh.write(f"{_fmt(math.log10(r.epsilon))} {_fmt(math.log10(v))}\n")
    if report.fit is not None:
        paths["fit_plot"] = out / "fit_loglog.dat"
        with open(paths["fit_plot"], "w") as fh:
            fh.write(f"# log10(epsilon) log10(fit)  slope={_fmt(report.fit.beta)}\n")
            for r in report.records:
                y = report.fit.intercept + report.fit.beta * math.log(r.epsilon)
                fh.write(f"{_fmt(math.log10(r.epsilon))} {_fmt(y / math.log(10))}\n")
    return paths


def reload_and_check(outdir: str | Path) -> tuple[dict, dict]:
    """Recompute pass flags from the written files; returns (stored, recomputed)."""
    out = Path(outdir)
    with open(out / "summary.json") as fh:
        summary = json.load(fh)
    records = read_records_csv(out / "records.csv")
    window = tuple(float(v) for v in summary["rate_window"])
    report = SweepReport(summary["name"], summary["alpha"], summary["variant"], summary["eta"],
                         summary["floor_factor"], records, summary["beta_theory"], window)
    try:
        report.fit = fit_rate(records, report.eta, report.floor_factor)
    except InsufficientPointsError:
        report.fit = None
    return summary["flags"], evaluate_flags(report)
