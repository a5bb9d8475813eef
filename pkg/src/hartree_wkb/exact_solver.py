"""
Strang-split spectral propagation of

    i eps u_t = -(eps^2 / 2) Lap u + eps^alpha (K * |u|^2) u

on the periodic grid.  Both subflows are exact: the free flow is the
multiplier exp(-i eps t |xi|^2 / 2) and the potential flow is the pointwise
phase rotation u -> u exp(-i eps^(alpha-1) t V) with V = K * |u|^2 real, so
|u| (hence V) is frozen during it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InstabilityError, NonFiniteError, RepresentationError
from .kernels import KernelSpec
from .spectral_core import PHYSICAL, Field, Grid

log = logging.getLogger(__name__)

MAX_HALVINGS = 12
L2_DRIFT_LIMIT = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    eps: float
    alpha: float
    T: float
    kernel: KernelSpec
    dt_initial: float = 0.05
    eta: float = 0.1
    snapshot_times: Sequence[float] = (0.0,)

    def __post_init__(self) -> None:
        if not 0 < self.eps <= 1:
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        if not self.alpha >= 1:
            raise ValueError(f"alpha must be >= 1, got {self.alpha}")
        if not self.T > 0 or not self.dt_initial > 0 or not self.eta > 0:
            raise ValueError("T, dt_initial and eta must be positive")
        times = [float(t) for t in self.snapshot_times]
        if times != sorted(times) or (times and (times[0] < 0 or times[-1] > self.T)):
            raise ValueError("snapshot_times must be sorted and lie in [0, T]")
        object.__setattr__(self, "snapshot_times", tuple(times))

    @property
    def coupling(self) -> float:
        """Prefactor eps^(alpha-1) of the potential flow."""
        return self.eps ** (self.alpha - 1)

    @property
    def tolerance(self) -> float:
        """Refinement target eta * eps^2 in the max norm."""
        return self.eta * self.eps**2


@dataclass
class Trajectory:
    config: SolverConfig
    snapshots: list[tuple[float, Field]]
    l2_drift: float
    dt: float = math.nan
    final: Field | None = None
    history: list[tuple[float, float]] = field(default_factory=list)


def _potential(grid: Grid, u: np.ndarray, symbol: np.ndarray | None) -> np.ndarray:
    if symbol is None:
        return np.zeros(u.shape)
    return np.fft.ifftn(np.fft.fftn(np.abs(u) ** 2) * symbol).real


def _symbol(cfg: SolverConfig, grid: Grid) -> np.ndarray | None:
    return None if cfg.kernel.family == "zero" else cfg.kernel.symbol(grid)


def strang_step(u: Field, dt: float, cfg: SolverConfig) -> Field:
    """One step: half free flow, full potential flow, half free flow."""
    if u.representation != PHYSICAL:
        raise RepresentationError("strang_step expects a physical field")
    grid = u.grid
    half = np.exp(-0.25j * cfg.eps * dt * grid.xi2)
    w = np.fft.ifftn(np.fft.fftn(u.samples) * half)
    V = _potential(grid, w, _symbol(cfg, grid))
    w = w * np.exp(-1j * cfg.coupling * dt * V)
    w = np.fft.ifftn(np.fft.fftn(w) * half)
    if not np.all(np.isfinite(w)):
        raise NonFiniteError("non-finite field after Strang step")
    return Field(grid, w)


def _segment(grid: Grid, u: np.ndarray, length: float, steps: int, cfg: SolverConfig, symbol) -> np.ndarray:
    """Advance by ``length`` with ``steps`` fused Strang steps."""
    dt = length / steps
    half = np.exp(-0.25j * cfg.eps * dt * grid.xi2)
    full = half * half
    c = cfg.coupling * dt
    hat = np.fft.fftn(u) * half
    for i in range(steps):
        w = np.fft.ifftn(hat)
        if symbol is not None:
            w = w * np.exp(-1j * c * _potential(grid, w, symbol))
        hat = np.fft.fftn(w) * (full if i < steps - 1 else half)
    out = np.fft.ifftn(hat)
    if not np.all(np.isfinite(out)):
        raise NonFiniteError("non-finite field during propagation")
    return out


def _breakpoints(cfg: SolverConfig) -> list[float]:
    return sorted(set([0.0, *cfg.snapshot_times, cfg.T]))


def _base_steps(cfg: SolverConfig) -> list[int]:
    pts = _breakpoints(cfg)
    return [max(1, math.ceil((b - a) / cfg.dt_initial - 1e-9)) for a, b in zip(pts[:-1], pts[1:])]


def propagate_fixed(cfg: SolverConfig, u0: Field, halvings: int = 0) -> Trajectory:
    """One propagation with the step dt_initial / 2^halvings (per segment)."""
    grid = u0.grid
    symbol = _symbol(cfg, grid)
    pts = _breakpoints(cfg)
    steps = [n * 2**halvings for n in _base_steps(cfg)]
    u = np.array(u0.physical(), dtype=complex)
    mass0 = grid.l2_norm(u)
    states = {0.0: u}
    drift = 0.0
    for (a, b), n in zip(zip(pts[:-1], pts[1:]), steps):
        u = _segment(grid, u, b - a, n, cfg, symbol)
        states[b] = u
        if mass0 > 0:
            drift = max(drift, abs(grid.l2_norm(u) / mass0 - 1))
    snaps = [(t, Field(grid, states[t].copy())) for t in cfg.snapshot_times]
    return Trajectory(cfg, snaps, drift, cfg.dt_initial / 2**halvings, Field(grid, states[cfg.T]))


def propagate(cfg: SolverConfig, u0: Field) -> Trajectory:
    """Halve the step until two successive runs agree to eta*eps^2 at T.

    Returns the finer of the two agreeing runs.
    """
    prev = propagate_fixed(cfg, u0, 0)
    history = [(prev.dt, math.nan)]
    for k in range(1, MAX_HALVINGS + 1):
        cur = propagate_fixed(cfg, u0, k)
        diff = float(np.max(np.abs(cur.final.samples - prev.final.samples)))
        history.append((cur.dt, diff))
        log.debug("eps=%g alpha=%g dt=%g diff=%.3e", cfg.eps, cfg.alpha, cur.dt, diff)
        if diff < cfg.tolerance:
            if cur.l2_drift > L2_DRIFT_LIMIT:
                raise InstabilityError(f"L2 drift {cur.l2_drift:.3e} exceeds {L2_DRIFT_LIMIT}")
            cur.history = history
            return cur
        prev = cur
    raise InstabilityError(
        f"step refinement did not reach {cfg.tolerance:.3e} within {MAX_HALVINGS} halvings "
        f"(last difference {history[-1][1]:.3e})"
    )
