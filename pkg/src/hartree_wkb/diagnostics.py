"""
Discrete Wiener-algebra calculus and residual diagnostics.

The Wiener norm on the torus is the l1 norm of the Fourier-series
coefficients,

    ||f||_W = sum_m |c_m| = (2 pi)^(-d/2) * sum_m |f_hat(xi_m)| * dxi^d,

i.e. the Riemann sum of the L1 norm of f_hat carrying the factor
(2 pi)^(-d/2) of the inversion formula.  With this normalisation
sup|f| <= ||f||_W and ||fg||_W <= ||f||_W ||g||_W hold with constant one,
and ||K * f||_W <= sup|symbol| ||f||_W with the convolution symbol of
:mod:`hartree_wkb.kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridError
from .kernels import KernelSpec, convolve_samples
from .spectral_core import Field, Grid
from .wkb_builder import AmplitudeSet, ModeSpec, STANDARD, EPS_MODULATED, check_lattice, check_min_gap, fast_phases


def wiener_norm_samples(grid: Grid, samples: np.ndarray) -> float:
    return float(np.sum(np.abs(np.fft.fftn(samples))) / grid.size)


def wiener_norm(f: Field) -> float:
    """l1 norm of the Fourier-series coefficients of f."""
    return wiener_norm_samples(f.grid, f.physical())


@dataclass(frozen=True)
class NormReport:
    wiener: float
    l2: float
    linf: float
    per_mode_wiener: tuple[float, ...] = ()


def norm_report(f: Field, A: AmplitudeSet | None = None) -> NormReport:
    u = f.physical()
    per_mode = tuple(wiener_norm_samples(f.grid, a) for a in A.values) if A is not None else ()
    return NormReport(wiener_norm(f), f.grid.l2_norm(u), float(np.max(np.abs(u))), per_mode)


def calA_norm(A: AmplitudeSet) -> float:
    """sum_j ||A_j||_W."""
    return float(sum(wiener_norm_samples(A.grid, a) for a in A.values))


def grad_calA_norm(A: AmplitudeSet) -> float:
    """sum_j sum_n ||d_n A_j||_W."""
    g = A.gradients()
    return float(sum(wiener_norm_samples(A.grid, g[j, n]) for j in range(A.J) for n in range(A.grid.d)))


def lap_calA_norm(A: AmplitudeSet) -> float:
    """sum_j ||Lap A_j||_W."""
    return float(sum(wiener_norm_samples(A.grid, a) for a in A.laplacians()))


def sup_error(u: Field, v: Field) -> float:
    """max over the nodes of |u - v|."""
    u.grid.check_same(v.grid)
    return float(np.max(np.abs(u.physical() - v.physical())))


@dataclass
class ResidualReport:
    X2: Field
    Y: Field
    YR: Field
    remainder: Field
    eps: float
    alpha: float
    variant: str
    norms: dict = field(default_factory=dict)


def remainder_weights(eps: float, alpha: float, variant: str) -> tuple[float, float, float]:
    """Prefactors (of X2, of Y, of Y_R) in the remainder."""
    if variant == EPS_MODULATED or alpha == 1:
        return eps**2, 0.0, eps**alpha
    if variant == STANDARD:
        return eps**2, eps**alpha, eps**alpha
    raise ValueError(f"unknown variant {variant!r}")


def residual_terms(
    A: AmplitudeSet, modes: ModeSpec, kernel: KernelSpec, eps: float, alpha: float, t: float
) -> ResidualReport:
    """X2, Y, Y_R and their combination into the remainder at time t."""
    grid = A.grid
    check_lattice(modes, eps, grid)
    e = fast_phases(modes, t, eps, grid)
    vals = A.values
    waves = vals * e
    u_app = np.sum(waves, axis=0)

    X2 = 0.5 * np.sum(e * A.laplacians(), axis=0)
    density = np.sum(np.abs(vals) ** 2, axis=0)
    Y = -convolve_samples(kernel, grid, density) * u_app
    cross = np.zeros(grid.shape, dtype=complex)
    for l in range(A.J):
        for m in range(A.J):
            if l != m:
                cross += waves[l] * np.conj(waves[m])
    YR = -convolve_samples(kernel, grid, cross) * u_app

    wx, wy, wr = remainder_weights(eps, alpha, A.variant)
    R = wx * X2 + wy * Y + wr * YR
    fields = {"X2": X2, "Y": Y, "YR": YR, "remainder": R}
    norms = {name: wiener_norm_samples(grid, v) for name, v in fields.items()}
    return ResidualReport(
        Field(grid, X2), Field(grid, Y), Field(grid, YR), Field(grid, R), eps, alpha, A.variant, norms
    )


def yr_bound_constant(modes: ModeSpec, kernel: KernelSpec, grid: Grid) -> float:
    """C_K = |Lambda|_inf * max(d * sup|xi symbol|, 2 * sup|symbol|)."""
    gap = check_min_gap(modes)
    return gap.lambda_inf * max(grid.d * kernel.gradient_symbol_sup(grid), 2 * kernel.symbol_sup(grid))


def yr_bound(A: AmplitudeSet, modes: ModeSpec, kernel: KernelSpec, eps: float) -> float:
    """eps * C_K * ||A||^2 (||A|| + ||grad A||) in the calA norm."""
    a = calA_norm(A)
    return eps * yr_bound_constant(modes, kernel, A.grid) * a**2 * (a + grad_calA_norm(A))


def yr_bound_check(report: ResidualReport, A: AmplitudeSet, modes: ModeSpec, kernel: KernelSpec, eps: float) -> float:
    """||Y_R||_W divided by the bound; the bound holds when this is <= 1 + 1e-6."""
    if modes.J < 2:
        raise ValueError("the Y_R bound needs at least two modes")
    if report.YR.grid is not A.grid and not report.YR.grid.same_as(A.grid):
        raise GridError("report and amplitudes live on different grids")
    bound = yr_bound(A, modes, kernel, eps)
    norm = report.norms.get("YR", wiener_norm(report.YR))
    if bound == 0:
        return 0.0 if norm == 0 else np.inf
    return norm / bound
