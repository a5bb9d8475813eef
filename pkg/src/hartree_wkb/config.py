"""
Sweep configuration and its YAML file format.

Example file::

    name: scenario_a_alpha1
    dimension: 1
    alpha: 1.0
    variant: standard            # or epsilon_modulated
    epsilons: [0.25, 0.125, 0.0625, 0.03125, 0.015625]
    T: 0.5
    box_length: 32pi             # number, or "<c>pi"
    kernel: {family: exponential1d, sign: 1, lambda: 1.0}
    modes:
      - k: [-1]
        profile: {type: gaussian, center: [0], width: 1, weight: 1}
      - k: [2]
        profile: {type: gaussian, center: [2], width: 1, weight: "0.8+0.3j"}
    solver: {dt_initial: 0.05, eta: 1.0e-3}
    grid: {n_sigma: 8, safety: 2, max_points: 32768}
    snapshots: 11
    rate_tolerance: {below: 0.2, above: 0.25}
    floor_factor: 100
    output_dir: out/scenario_a_alpha1
    workers: 1
    record_timings: true
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from .kernels import KernelSpec, constant_kernel, exponential1d, yukawa3d, zero_kernel
from .spectral_core import Grid, GridSpec, make_grid, resolve_points
from .wkb_builder import STANDARD, VARIANTS, GaussianProfile, Mode, ModeSpec, check_lattice


@dataclass(frozen=True)
class SweepConfig:
    name: str
    dimension: int
    alpha: float
    modes: ModeSpec
    kernel: KernelSpec
    epsilons: tuple[float, ...]
    box_length: float
    variant: str = STANDARD
    T: float = 0.5
    dt_initial: float = 0.05
    eta: float = 0.1
    n_sigma: float = 8.0
    safety: float = 2.0
    max_points: int = 32768
    snapshots: int = 11
    rate_below: float = 0.2
    rate_above: float = math.inf
    floor_factor: float = 100.0
    output_dir: str = "out"
    workers: int = 1
    record_timings: bool = True
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        if self.modes.dimension != self.dimension:
            raise ValueError("mode wavevectors do not match the dimension")
        if self.snapshots < 1 or self.workers < 1:
            raise ValueError("snapshots and workers must be positive")

    def with_(self, **changes: Any) -> "SweepConfig":
        return replace(self, **changes)

    @property
    def snapshot_times(self) -> tuple[float, ...]:
        if self.snapshots == 1:
            return (self.T,)
        return tuple(float(t) for t in np.linspace(0.0, self.T, self.snapshots))

    def grid_for(self, eps: float) -> Grid:
        """Grid from the resolution rule, validated for lattice compatibility."""
        kmax = float(np.max(np.linalg.norm(self.modes.wavevectors, axis=1)))
        sigma = max(m.profile.spectral_sigma for m in self.modes.modes)
        n = resolve_points(self.box_length, kmax / eps, sigma, self.n_sigma, self.safety, self.max_points)
        grid = make_grid(GridSpec(self.dimension, n, self.box_length))
        check_lattice(self.modes, eps, grid)
        return grid


def _number(v: Any) -> float:
    if isinstance(v, str):
        s = v.replace(" ", "").replace("*", "")
        if s.endswith("pi"):
            head = s[:-2]
            return (float(head) if head else 1.0) * math.pi
        return float(s)
    return float(v)


def _complex(v: Any) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


def kernel_from_dict(d: dict) -> KernelSpec:
    family = d.get("family", "zero")
    if family == "zero":
        return zero_kernel()
    if family == "constant":
        return constant_kernel(_number(d.get("value", d.get("c", 0.0))))
    if family == "yukawa3d":
        return yukawa3d(_number(d.get("sign", 1)), _number(d.get("lambda", 1.0)))
    if family == "exponential1d":
        return exponential1d(_number(d.get("sign", 1)), _number(d.get("lambda", 1.0)))
    raise ValueError(f"kernel family {family!r} cannot be configured from a file")


def modes_from_list(items: list) -> ModeSpec:
    modes = []
    for item in items:
        prof = item["profile"]
        if prof.get("type", "gaussian") != "gaussian":
            raise ValueError("only gaussian profiles can be configured from a file")
        profile = GaussianProfile(
            tuple(_number(c) for c in np.atleast_1d(prof.get("center", [0.0]))),
            _number(prof.get("width", 1.0)),
            _complex(prof.get("weight", 1.0)),
        )
        modes.append(Mode(tuple(_number(k) for k in np.atleast_1d(item["k"])), profile))
    return ModeSpec(tuple(modes))


def config_from_dict(d: dict, output_dir: Optional[str] = None) -> SweepConfig:
    solver = d.get("solver", {})
    grid = d.get("grid", {})
    rate = d.get("rate_tolerance", {})
    above = rate.get("above", math.inf)
    return SweepConfig(
        name=str(d.get("name", "sweep")),
        dimension=int(d.get("dimension", 1)),
        alpha=_number(d["alpha"]),
        modes=modes_from_list(d["modes"]),
        kernel=kernel_from_dict(d.get("kernel", {})),
        epsilons=tuple(_number(e) for e in d["epsilons"]),
        box_length=_number(d["box_length"]),
        variant=str(d.get("variant", STANDARD)),
        T=_number(d.get("T", 0.5)),
        dt_initial=_number(solver.get("dt_initial", 0.05)),
        eta=_number(solver.get("eta", 0.1)),
        n_sigma=_number(grid.get("n_sigma", 8)),
        safety=_number(grid.get("safety", 2)),
        max_points=int(grid.get("max_points", 32768)),
        snapshots=int(d.get("snapshots", 11)),
        rate_below=_number(rate.get("below", 0.2)),
        rate_above=math.inf if above in (None, "inf") else _number(above),
        floor_factor=_number(d.get("floor_factor", 100)),
        output_dir=str(output_dir or d.get("output_dir", "out")),
        workers=int(d.get("workers", 1)),
        record_timings=bool(d.get("record_timings", True)),
    )


def load_config(path: str | Path, output_dir: Optional[str] = None) -> SweepConfig:
    with open(path) as fh:
        return config_from_dict(yaml.safe_load(fh), output_dir)


def scenario_a(alpha: float = 1.0, variant: str = STANDARD, **changes: Any) -> SweepConfig:
    """Two Gaussian modes k = -1, 2 with the exponential kernel on L = 32 pi."""
    modes = ModeSpec((
        Mode((-1.0,), GaussianProfile((0.0,), 1.0, 1.0)),
        Mode((2.0,), GaussianProfile((2.0,), 1.0, 0.8 + 0.3j)),
    ))
    cfg = SweepConfig(
        name=f"scenario_a_alpha{alpha:g}_{variant}",
        dimension=1,
        alpha=alpha,
        modes=modes,
        kernel=exponential1d(1.0, 1.0),
        epsilons=tuple(2.0**-n for n in range(2, 7)),
        box_length=32 * math.pi,
        variant=variant,
        eta=1e-3,
    )
    return cfg.with_(**changes) if changes else cfg
