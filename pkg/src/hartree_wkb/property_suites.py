"""Randomised checks of the Wiener-algebra inequalities and WKB invariants."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagnostics import calA_norm, wiener_norm_samples
from .kernels import KernelSpec, convolve_samples, exponential1d, verify_kernel_hypothesis
from .spectral_core import Grid, GridSpec, make_grid
from .wkb_builder import (
    EPS_MODULATED,
    STANDARD,
    ModeSpec,
    assemble_u_app,
    build_amplitudes,
    build_initial_data,
    carrier,
    check_min_gap,
    eikonal_residual,
)

SLACK = 1e-9


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    violations: int = 0
    worst: float = -np.inf
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checks > 0 and self.violations == 0

    def record(self, excess: float, tol: float = 0.0) -> None:
        """``excess`` is lhs - rhs (or a deviation); a violation if it exceeds ``tol``."""
        self.checks += 1
        self.worst = max(self.worst, float(excess))
        if not excess <= tol:
            self.violations += 1

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: {self.checks} checks, {self.violations} violations, worst excess {self.worst:.3e}"


def random_band_limited(rng: np.random.Generator, grid: Grid, band: int, count: int = 1) -> np.ndarray:
    """Fields with random complex Fourier coefficients on |m| <= band (per axis)."""
    m = np.rint(np.fft.fftfreq(grid.n, d=1.0 / grid.n)).astype(int)
    mask = np.ones(grid.shape, dtype=bool)
    for ax in range(grid.d):
        shape = [1] * grid.d
        shape[ax] = grid.n
        mask &= (np.abs(m) <= band).reshape(shape)
    out = np.empty((count, *grid.shape), dtype=complex)
    for i in range(count):
        c = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) * mask
        c *= rng.uniform(0.1, 2.0) / max(np.sum(np.abs(c)), 1e-300)
        out[i] = np.fft.ifftn(c) * grid.size
    return out


def _random_kernel(rng: np.random.Generator) -> KernelSpec:
    return exponential1d(sign=float(rng.choice([-1.0, 1.0])), lam=float(rng.uniform(0.3, 3.0)))


def _default_grid() -> Grid:
    return make_grid(GridSpec(1, 128, 2 * np.pi))


def submultiplicativity(n: int = 100, seed: int = 0, grid: Grid | None = None) -> SuiteResult:
    grid = grid or _default_grid()
    rng = np.random.default_rng(seed)
    res = SuiteResult("wiener submultiplicativity ||fg|| <= ||f|| ||g||")
    for _ in range(n):
        f, g = random_band_limited(rng, grid, int(rng.integers(1, grid.n // 2)), 2)
        lhs = wiener_norm_samples(grid, f * g)
        rhs = wiener_norm_samples(grid, f) * wiener_norm_samples(grid, g)
        res.record(lhs - rhs, SLACK * max(1.0, rhs))
    return res


def unitarity(n: int = 100, seed: int = 1, grid: Grid | None = None) -> SuiteResult:
    grid = grid or _default_grid()
    rng = np.random.default_rng(seed)
    res = SuiteResult("free group is an isometry of W")
    for _ in range(n):
        (f,) = random_band_limited(rng, grid, int(rng.integers(1, grid.n // 2)))
        t, eps = rng.uniform(-5, 5), rng.uniform(0.01, 1)
        Uf = grid.multiply(f, np.exp(0.5j * t * eps * grid.xi2))
        w = wiener_norm_samples(grid, f)
        res.record(abs(wiener_norm_samples(grid, Uf) - w), 1e-12 * max(1.0, w))
    return res


def young_bound(n: int = 100, seed: int = 2, grid: Grid | None = None, kernel: KernelSpec | None = None) -> SuiteResult:
    grid = grid or _default_grid()
    rng = np.random.default_rng(seed)
    res = SuiteResult("convolution bound ||K*(uv)|| <= sup|K_hat| ||uv||")
    for _ in range(n):
        K = kernel or _random_kernel(rng)
        u, v = random_band_limited(rng, grid, int(rng.integers(1, grid.n // 2)), 2)
        lhs = wiener_norm_samples(grid, convolve_samples(K, grid, u * v))
        rhs = K.symbol_sup(grid) * wiener_norm_samples(grid, u * v)
        res.record(lhs - rhs, SLACK * max(1.0, rhs))
    return res


def trilinear(n: int = 100, seed: int = 3, grid: Grid | None = None, kernel: KernelSpec | None = None) -> SuiteResult:
    grid = grid or _default_grid()
    rng = np.random.default_rng(seed)
    res = SuiteResult("trilinear bound ||(K*(uv))w|| <= sup|K_hat| ||u|| ||v|| ||w||")
    for _ in range(n):
        K = kernel or _random_kernel(rng)
        u, v, w = random_band_limited(rng, grid, int(rng.integers(1, grid.n // 2)), 3)
        lhs = wiener_norm_samples(grid, convolve_samples(K, grid, u * v) * w)
        rhs = K.symbol_sup(grid) * np.prod([wiener_norm_samples(grid, a) for a in (u, v, w)])
        res.record(lhs - rhs, SLACK * max(1.0, rhs))
    return res


def shift_bound(n: int = 100, seed: int = 4, grid: Grid | None = None) -> SuiteResult:
    """||sum_j b_j e^{i k_j x / eps}|| <= sum_j ||b_j||, with equality for disjoint shifted spectra."""
    grid = grid or make_grid(GridSpec(1, 256, 2 * np.pi))
    rng = np.random.default_rng(seed)
    res = SuiteResult("shift bound ||sum b_j e^{ik_j x/eps}|| <= sum ||b_j||")
    half = grid.n // 2
    for i in range(n):
        J = int(rng.integers(2, 5))
        band = int(rng.integers(1, 8))
        eps = float(2.0 ** -rng.integers(0, 4))
        disjoint = i % 2 == 0
        if disjoint:
            # carrier indices spaced by more than 2 * band, inside the Nyquist box
            base = rng.choice(np.arange(-(half - band - 1) // (2 * band + 1), (half - band - 1) // (2 * band + 1)),
                              size=J, replace=False)
            idx = base * (2 * band + 1)
        else:
            idx = rng.choice(np.arange(-half // 2, half // 2), size=J, replace=False)
        # lattice index m means k / eps = m for L = 2 pi
        k = idx * eps
        b = random_band_limited(rng, grid, band, J)
        f = sum(b[j] * carrier(grid, (k[j],), eps) for j in range(J))
        lhs = wiener_norm_samples(grid, f)
        rhs = sum(wiener_norm_samples(grid, bj) for bj in b)
        res.record(lhs - rhs, 1e-10 * max(1.0, rhs))
        if disjoint:
            res.record(abs(lhs - rhs), 1e-10 * max(1.0, rhs))
    return res


def wiener_suite(n: int = 100, seed: int = 0) -> list[SuiteResult]:
    return [
        submultiplicativity(n, seed),
        unitarity(n, seed + 1),
        trilinear(n, seed + 3),
        shift_bound(n, seed + 4),
    ]


def kernel_suite(kernel: KernelSpec, grid: Grid, n: int = 100, seed: int = 0) -> list[SuiteResult]:
    rep = verify_kernel_hypothesis(kernel, grid)
    hyp = SuiteResult("kernel hypotheses (K_hat, (1+|xi|) K_hat, |xi| K_hat bounded)")
    hyp.checks = 3
    hyp.violations = sum(not flag for flag in (rep.khat_bounded, rep.weighted_bounded, rep.gradient_bounded))
    hyp.worst = rep.sup_weighted
    hyp.notes.append(f"sup K_hat={rep.sup_khat:.6g} sup (1+|xi|)K_hat={rep.sup_weighted:.6g} "
                     f"sup |xi|K_hat={rep.sup_gradient:.6g}")
    return [hyp, young_bound(n, seed + 2, grid, kernel), trilinear(n, seed + 3, grid, kernel)]


def wkb_suite(modes: ModeSpec, kernel: KernelSpec, grid: Grid, eps: float, alpha: float,
              times=(0.0, 0.1, 0.25, 0.5)) -> list[SuiteResult]:
    """Invariants of the transported amplitudes and of u_app on one configuration."""
    gap = SuiteResult("min-gap condition")
    gap.record(0.0 if modes.J == 1 or check_min_gap(modes).min_gap > 0 else 1.0)
    eik = SuiteResult("eikonal identity for plane-wave phases")
    for r in eikonal_residual(modes):
        eik.record(abs(r), 0.0)

    modulus = SuiteResult("modulus transport |A_j(t,x)| = |a_j(x - t k_j)|")
    mass = SuiteResult("per-mode mass ||A_j(t)|| = ||a_j||")
    wbound = SuiteResult("W bound ||u_app(t)|| <= ||A(t)||_calA")
    init = SuiteResult("u_app(0) = u0")
    a = modes.profiles(grid)
    a_mass = [grid.l2_norm(aj) for aj in a]
    for t in times:
        A = build_amplitudes(modes, t, kernel, alpha, grid, STANDARD, eps)
        Am = build_amplitudes(modes, t, kernel, alpha, grid, EPS_MODULATED, eps)
        for AA in (A, Am):
            vals = AA.values
            for j, mode in enumerate(modes.modes):
                exact = np.abs(grid.multiply(mode.profile.evaluate(grid), np.exp(-1j * t * grid.dot_xi(mode.k))))
                modulus.record(float(np.max(np.abs(np.abs(vals[j]) - exact))), 1e-10)
                mass.record(abs(grid.l2_norm(vals[j]) - a_mass[j]), 1e-10 * max(1.0, a_mass[j]))
            u = assemble_u_app(AA, modes, t, eps)
            wbound.record(wiener_norm_samples(grid, u.samples) - calA_norm(AA), 1e-10)
        if t == 0:
            u0 = build_initial_data(modes, eps, grid)
            init.record(float(np.max(np.abs(assemble_u_app(A, modes, 0.0, eps).samples - u0.samples))), 1e-12)
    out = [gap, eik, modulus, mass, wbound]
    if init.checks:
        out.append(init)
    return out
