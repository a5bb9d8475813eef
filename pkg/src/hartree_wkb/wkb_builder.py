"""
Multiphase WKB approximation for the Hartree equation.

For plane-wave data u0 = sum_j a_j(x) exp(i k_j.x / eps) the approximation is

    u_app(t, x) = sum_j A_j(t, x) exp(i (k_j.x - t |k_j|^2 / 2) / eps),
    A_j(t, x)   = a_j(x - t k_j) exp(i s S_j(t, x)),

    S_j(t, .) = - int_0^t (K * sum_l |a_l(. + (tau - t) k_j - tau k_l)|^2) dtau

where the phase scale s is 1 for alpha = 1, 0 for alpha > 1 (standard
variant) and eps^(alpha-1) for the eps-modulated variant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import numpy as np

from .errors import GridError, LatticeError, QuadratureError
from .kernels import KernelSpec, convolve_samples
from .spectral_core import PHYSICAL, Field, Grid

STANDARD = "standard"
EPS_MODULATED = "epsilon_modulated"
VARIANTS = (STANDARD, EPS_MODULATED)

MAX_DOUBLINGS = 12
LATTICE_TOL = 1e-9


class Profile(Protocol):
    def evaluate(self, grid: Grid) -> np.ndarray: ...

    @property
    def spectral_sigma(self) -> float: ...


@dataclass(frozen=True)
class GaussianProfile:
    """weight * exp(-|x - center|^2 / (2 width^2)), wrapped onto the torus."""

    center: tuple[float, ...]
    width: float
    weight: complex = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if not self.width > 0:
            raise ValueError("Gaussian width must be positive")

    def evaluate(self, grid: Grid) -> np.ndarray:
        r = grid.periodic_offset(self.center)
        return self.weight * np.exp(-np.sum(r**2, axis=0) / (2 * self.width**2))

    @property
    def spectral_sigma(self) -> float:
        return 1.0 / self.width


@dataclass(frozen=True, eq=False)
class SampledProfile:
    """Band-limited samples on a reference grid, Fourier-interpolated onto others."""

    grid: Grid
    samples: np.ndarray

    def evaluate(self, grid: Grid) -> np.ndarray:
        if grid.same_as(self.grid):
            return np.asarray(self.samples, dtype=complex)
        if grid.d != self.grid.d or not np.allclose(grid.lengths, self.grid.lengths):
            raise GridError("sampled profile can only be resampled onto a grid with the same box")
        src = np.fft.fftshift(np.fft.fftn(self.samples)) / self.grid.size
        n_src, n_dst = self.grid.n, grid.n
        out = np.zeros(grid.shape, dtype=complex)
        if n_dst >= n_src:
            lo = (n_dst - n_src) // 2
            out[(slice(lo, lo + n_src),) * grid.d] = src
        else:
            lo = (n_src - n_dst) // 2
            out = src[(slice(lo, lo + n_dst),) * grid.d]
        return np.fft.ifftn(np.fft.ifftshift(out)) * grid.size

    @property
    def spectral_sigma(self) -> float:
        p = np.abs(np.fft.fftn(self.samples)) ** 2
        total = p.sum()
        if total == 0:
            return 0.0
        return float(np.sqrt(np.sum(self.grid.xi2 * p) / total))


@dataclass(frozen=True)
class Mode:
    k: tuple[float, ...]
    profile: Profile

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", tuple(float(v) for v in np.atleast_1d(self.k)))


@dataclass(frozen=True)
class ModeSpec:
    modes: tuple[Mode, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.modes:
            raise ValueError("need at least one mode")
        dims = {len(m.k) for m in self.modes}
        if len(dims) != 1:
            raise ValueError("all wavevectors must have the same dimension")

    @property
    def J(self) -> int:
        return len(self.modes)

    @property
    def wavevectors(self) -> np.ndarray:
        return np.array([m.k for m in self.modes])

    @property
    def dimension(self) -> int:
        return len(self.modes[0].k)

    def profiles(self, grid: Grid) -> np.ndarray:
        return np.array([m.profile.evaluate(grid) for m in self.modes], dtype=complex)


@dataclass(frozen=True)
class GapReport:
    min_gap: float
    lambda_inf: float
    table: dict


def check_min_gap(modes: ModeSpec) -> GapReport:
    """Pairwise Lambda_{l,m} = (k_l - k_m) / |k_l - k_m|^2 and its sup norm."""
    k = modes.wavevectors
    table = {}
    min_gap = math.inf
    for l in range(modes.J):
        for m in range(modes.J):
            if l == m:
                continue
            diff = k[l] - k[m]
            gap = float(np.linalg.norm(diff))
            if gap == 0:
                raise ValueError(f"modes {l} and {m} share the wavevector {tuple(k[l])}")
            table[(l, m)] = diff / gap**2
            min_gap = min(min_gap, gap)
    return GapReport(min_gap, 0.0 if min_gap == math.inf else 1.0 / min_gap, table)


def lattice_indices(grid: Grid, k: Sequence[float], eps: float) -> np.ndarray:
    """Integer m with k / eps = (2 pi / L) m, or LatticeError."""
    k = np.asarray(k, dtype=float)
    m = k / eps * np.asarray(grid.lengths) / (2 * np.pi)
    mi = np.rint(m)
    if np.any(np.abs(m - mi) > LATTICE_TOL * np.maximum(1.0, np.abs(m))):
        raise LatticeError(f"k/eps = {tuple(k / eps)} is not on the reciprocal lattice of the grid")
    return mi.astype(np.int64)


def check_lattice(modes: ModeSpec, eps: float, grid: Grid) -> None:
    if modes.dimension != grid.d:
        raise GridError("mode dimension differs from grid dimension")
    for mode in modes.modes:
        lattice_indices(grid, mode.k, eps)


def carrier(grid: Grid, k: Sequence[float], eps: float) -> np.ndarray:
    """exp(i k.x / eps) on the nodes, in exact integer arithmetic for the angle."""
    m = lattice_indices(grid, k, eps)
    n = grid.n
    idx = np.indices(grid.shape)
    # k.x/eps = sum_a 2 pi m_a (j_a / N - 1/2)
    frac = np.zeros(grid.shape, dtype=np.int64)
    for a in range(grid.d):
        frac = (frac + m[a] * idx[a]) % n
    half = int(np.sum(m)) % 2
    return np.exp(2j * np.pi * frac / n) * (-1.0 if half else 1.0)


def build_initial_data(modes: ModeSpec, eps: float, grid: Grid) -> Field:
    """sum_j a_j(x) exp(i k_j.x / eps)."""
    check_lattice(modes, eps, grid)
    a = modes.profiles(grid)
    u = sum(a[j] * carrier(grid, m.k, eps) for j, m in enumerate(modes.modes))
    return Field(grid, u)


def _translate_batch(grid: Grid, f: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """f[j](x - shifts[j]) for a batch of fields."""
    out = np.empty(f.shape, dtype=complex)
    for j in range(f.shape[0]):
        out[j] = grid.multiply(f[j], np.exp(-1j * grid.dot_xi(shifts[j])))
    return out


def phase_quadrature(
    modes: ModeSpec,
    t: float,
    kernel: KernelSpec,
    grid: Grid,
    quadrature_nodes: int = 3,
    tol: float = 1e-9,
) -> tuple[np.ndarray, int]:
    """Composite Simpson in tau with node doubling.

    Returns (S, nodes) where S has shape (J, *grid.shape) and ``nodes`` is the
    number of tau nodes of the accepted rule.
    """
    if quadrature_nodes < 2:
        raise ValueError("quadrature_nodes must be >= 2")
    if t < 0:
        raise ValueError("t must be non-negative")
    J = modes.J
    S_shape = (J, *grid.shape)
    if t == 0 or kernel.family == "zero":
        return np.zeros(S_shape), quadrature_nodes
    k = modes.wavevectors
    axes = tuple(range(-grid.d, 0))
    rho_hat = np.fft.fftn(np.abs(modes.profiles(grid)) ** 2, axes=axes)
    symbol = kernel.symbol(grid)
    xi_dot_k = np.array([grid.dot_xi(kj) for kj in k])

    def slice_at(tau: float) -> np.ndarray:
        out = np.empty(S_shape)
        # rho_l translated by tau k_l, then every mode shifts by (t - tau) k_j
        acc = np.zeros(grid.shape, dtype=complex)
        for l in range(J):
            acc += rho_hat[l] * np.exp(-1j * tau * xi_dot_k[l])
        acc *= symbol
        for j in range(J):
            phase = np.exp(-1j * (t - tau) * xi_dot_k[j])
            out[j] = np.fft.ifftn(acc * phase, axes=axes).real
        return out

    n = max(2, quadrature_nodes - 1)
    n += n % 2
    ends = slice_at(0.0) + slice_at(t)
    odd = sum(slice_at(t * i / n) for i in range(1, n, 2))
    even = sum((slice_at(t * i / n) for i in range(2, n, 2)), np.zeros(S_shape))
    S = -(t / n) / 3 * (ends + 4 * odd + 2 * even)
    for _ in range(MAX_DOUBLINGS):
        n *= 2
        even = even + odd
        odd = sum(slice_at(t * i / n) for i in range(1, n, 2))
        S_new = -(t / n) / 3 * (ends + 4 * odd + 2 * even)
        change = float(np.max(np.abs(S_new - S)))
        S = S_new
        if change < tol:
            return S, n + 1
    raise QuadratureError(f"phase quadrature did not converge in {MAX_DOUBLINGS} doublings (change {change:.3e})")


def compute_phase_S(
    modes: ModeSpec,
    t: float,
    kernel: KernelSpec,
    grid: Grid,
    quadrature_nodes: int = 3,
    tol: float = 1e-9,
) -> list[Field]:
    S, _ = phase_quadrature(modes, t, kernel, grid, quadrature_nodes, tol)
    return [Field(grid, s) for s in S]


def phase_scale(alpha: float, variant: str, eps: Optional[float]) -> float:
    """Factor multiplying S_j in the amplitude phase."""
    if variant == STANDARD:
        return 1.0 if alpha == 1 else 0.0
    if variant == EPS_MODULATED:
        if eps is None:
            raise ValueError("the eps-modulated variant needs eps")
        return eps ** (alpha - 1)
    raise ValueError(f"unknown variant {variant!r}")


@dataclass
class AmplitudeSet:
    """Transported amplitudes at one time.

    ``envelopes`` holds a_j(x - t k_j), ``phases`` the S_j of the integral
    formula (zero when not needed) and ``scale`` the factor in exp(i scale S_j).
    """

    grid: Grid
    t: float
    alpha: float
    variant: str
    eps: Optional[float]
    envelopes: np.ndarray
    phases: np.ndarray
    scale: float

    @property
    def J(self) -> int:
        return self.envelopes.shape[0]

    @property
    def values(self) -> np.ndarray:
        if self.scale == 0:
            return self.envelopes.astype(complex)
        return self.envelopes * np.exp(1j * self.scale * self.phases)

    @property
    def A(self) -> list[Field]:
        return [Field(self.grid, a) for a in self.values]

    @property
    def S(self) -> list[Field]:
        return [Field(self.grid, s) for s in self.phases]

    def scaled(self, c: complex) -> "AmplitudeSet":
        return AmplitudeSet(self.grid, self.t, self.alpha, self.variant, self.eps,
                            c * self.envelopes, self.phases, self.scale)

    def gradients(self) -> np.ndarray:
        """grad A_j by the product rule, shape (J, d, *grid.shape)."""
        g = self.grid
        out = np.empty((self.J, g.d, *g.shape), dtype=complex)
        for j in range(self.J):
            gb = g.gradient(self.envelopes[j])
            if self.scale == 0:
                out[j] = gb
                continue
            gS = g.gradient(self.phases[j])
            e = np.exp(1j * self.scale * self.phases[j])
            for a in range(g.d):
                out[j, a] = (gb[a] + 1j * self.scale * self.envelopes[j] * gS[a].real) * e
        return out

    def laplacians(self) -> np.ndarray:
        """Lap A_j by the product rule, shape (J, *grid.shape)."""
        g = self.grid
        out = np.empty((self.J, *g.shape), dtype=complex)
        s = self.scale
        for j in range(self.J):
            b = self.envelopes[j]
            lb = g.laplacian(b)
            if s == 0:
                out[j] = lb
                continue
            S = self.phases[j]
            gb = g.gradient(b)
            gS = [v.real for v in g.gradient(S)]
            lS = g.laplacian(S).real
            cross = sum(gb[a] * gS[a] for a in range(g.d))
            grad2 = sum(gS[a] ** 2 for a in range(g.d))
            out[j] = (lb + 2j * s * cross + 1j * s * b * lS - s**2 * b * grad2) * np.exp(1j * s * S)
        return out


def build_amplitudes(
    modes: ModeSpec,
    t: float,
    kernel: KernelSpec,
    alpha: float,
    grid: Grid,
    variant: str = STANDARD,
    eps: Optional[float] = None,
    quadrature_nodes: int = 3,
    tol: float = 1e-9,
) -> AmplitudeSet:
    """A_j(t) = a_j(x - t k_j) exp(i scale S_j(t, x))."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    scale = phase_scale(alpha, variant, eps)
    a = modes.profiles(grid)
    env = _translate_batch(grid, a, t * modes.wavevectors) if t != 0 else a
    if scale != 0 and t != 0 and kernel.family != "zero":
        S, _ = phase_quadrature(modes, t, kernel, grid, quadrature_nodes, tol)
    else:
        S = np.zeros(a.shape)
    return AmplitudeSet(grid, t, alpha, variant, eps, env, S, scale)


def effective_potential(A: AmplitudeSet, kernel: KernelSpec) -> Field:
    """V_eff = K * sum_l |A_l|^2 (real)."""
    density = np.sum(np.abs(A.envelopes) ** 2, axis=0)
    V = convolve_samples(kernel, A.grid, density)
    scale = max(1.0, float(np.max(np.abs(V))))
    if np.max(np.abs(V.imag)) > 1e-10 * scale:
        raise ValueError("effective potential has a non-negligible imaginary part")
    return Field(A.grid, V.real)


def fast_phases(modes: ModeSpec, t: float, eps: float, grid: Grid) -> np.ndarray:
    """exp(i phi_j / eps) with phi_j = k_j.x - t |k_j|^2 / 2, shape (J, *shape)."""
    out = np.empty((modes.J, *grid.shape), dtype=complex)
    for j, m in enumerate(modes.modes):
        k2 = float(np.dot(m.k, m.k))
        out[j] = carrier(grid, m.k, eps) * np.exp(-0.5j * t * k2 / eps)
    return out


def assemble_u_app(A: AmplitudeSet, modes: ModeSpec, t: float, eps: float) -> Field:
    """sum_j A_j exp(i phi_j / eps)."""
    check_lattice(modes, eps, A.grid)
    e = fast_phases(modes, t, eps, A.grid)
    return Field(A.grid, np.sum(A.values * e, axis=0))


def eikonal_residual(modes: ModeSpec, t: float = 0.0) -> np.ndarray:
    """d_t phi_j + |grad phi_j|^2 / 2 for the plane-wave phases, per mode."""
    out = []
    for m in modes.modes:
        k = np.asarray(m.k)
        dt_phi = -0.5 * float(k @ k)
        grad_phi = k
        out.append(dt_phi + 0.5 * float(grad_phi @ grad_phi))
    return np.array(out)


def transport_coupling(A: AmplitudeSet) -> float:
    """Coefficient c in d_t A_j + k_j.grad A_j = -i c V_eff A_j."""
    if A.variant == STANDARD:
        return 1.0 if A.alpha == 1 else 0.0
    return A.scale


def transport_residual(
    A: AmplitudeSet,
    modes: ModeSpec,
    kernel: KernelSpec,
    dt_fd: float,
    quadrature_nodes: int = 3,
    tol: float = 1e-12,
) -> np.ndarray:
    """Max-norm of d_t A_j + k_j.grad A_j + i c V_eff A_j per mode.

    d_t by a central difference over A rebuilt at t -/+ dt_fd, grad spectrally.
    """
    if A.t - dt_fd < 0:
        raise ValueError("central difference would reach negative time")
    kw = dict(variant=A.variant, eps=A.eps, quadrature_nodes=quadrature_nodes, tol=tol)
    plus = build_amplitudes(modes, A.t + dt_fd, kernel, A.alpha, A.grid, **kw).values
    minus = build_amplitudes(modes, A.t - dt_fd, kernel, A.alpha, A.grid, **kw).values
    vals = A.values
    grads = A.gradients()
    c = transport_coupling(A)
    V = effective_potential(A, kernel).samples.real if c != 0 else 0.0
    out = np.empty(A.J)
    for j, mode in enumerate(modes.modes):
        adv = sum(mode.k[a] * grads[j, a] for a in range(A.grid.d))
        r = (plus[j] - minus[j]) / (2 * dt_fd) + adv + 1j * c * V * vals[j]
        out[j] = float(np.max(np.abs(r)))
    return out
