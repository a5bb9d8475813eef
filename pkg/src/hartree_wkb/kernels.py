"""
Interaction kernels given through their Fourier multiplier.

``khat`` is the transform of K under the unitary convention of
:mod:`hartree_wkb.spectral_core`.  Convolution then acts on spectral data
through the symbol (2 pi)^(d/2) * khat, which for the provided families is
simply the unnormalised integral of K(x) exp(-i x.xi).  All Wiener-norm
bounds in :mod:`hartree_wkb.diagnostics` use the sup of that symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import GridError, KernelHypothesisError
from .spectral_core import PHYSICAL, Field, Grid

FAMILIES = ("zero", "constant", "yukawa3d", "exponential1d", "custom")

# a weighted sup still growing by this factor between the inner half of the
# lattice and the full lattice is treated as unbounded
GROWTH_FACTOR = 1.5


@dataclass(frozen=True)
class KernelSpec:
    family: str
    sign: float = 1.0
    lam: float = 1.0
    value: float = 0.0
    multiplier: Optional[Callable[[np.ndarray], np.ndarray]] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family in ("yukawa3d", "exponential1d"):
            if self.sign not in (1, -1, 1.0, -1.0):
                raise ValueError("kernel sign must be +1 or -1")
            if not self.lam > 0:
                raise ValueError("screening length parameter lambda must be positive")
        if self.family == "custom" and self.multiplier is None:
            raise ValueError("custom kernel needs a multiplier callable")

    def khat(self, xi: np.ndarray) -> np.ndarray:
        """K_hat on an array of frequencies of shape (d, ...)."""
        xi = np.asarray(xi, dtype=float)
        r2 = np.sum(xi**2, axis=0)
        if self.family == "zero":
            return np.zeros_like(r2)
        if self.family == "constant":
            return np.full_like(r2, float(self.value))
        if self.family == "yukawa3d":
            return self.sign / (self.lam**2 + r2)
        if self.family == "exponential1d":
            return self.sign * np.sqrt(2 / np.pi) * self.lam / (self.lam**2 + r2)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.asarray(self.multiplier(xi), dtype=float)

    def khat_on(self, grid: Grid) -> np.ndarray:
        """Lattice samples of K_hat, cached per grid geometry."""
        if self.family == "exponential1d" and grid.d != 1:
            raise GridError("exponential1d kernel is one-dimensional")
        key = (grid.d, grid.n, grid.lengths)
        if key not in self._cache:
            self._cache[key] = np.broadcast_to(self.khat(grid.xi), grid.shape).copy()
        return self._cache[key]

    def symbol(self, grid: Grid) -> np.ndarray:
        """Convolution symbol (2 pi)^(d/2) K_hat on the lattice."""
        values = self.khat_on(grid)
        if not np.all(np.isfinite(values)):
            raise KernelHypothesisError("kernel multiplier is not finite on the lattice")
        return (2 * np.pi) ** (grid.d / 2) * values

    def symbol_sup(self, grid: Grid) -> float:
        """Lattice sup of the convolution symbol; the ||K_hat||_inf in Wiener bounds."""
        return float(np.max(np.abs(self.symbol(grid))))

    def gradient_symbol_sup(self, grid: Grid) -> float:
        """Lattice sup of |xi| times the convolution symbol."""
        return float(np.max(np.sqrt(grid.xi2) * np.abs(self.symbol(grid))))


def zero_kernel() -> KernelSpec:
    return KernelSpec("zero")


def constant_kernel(c: float) -> KernelSpec:
    return KernelSpec("constant", value=float(c))


def yukawa3d(sign: float = 1.0, lam: float = 1.0) -> KernelSpec:
    """Screened Coulomb kernel, K_hat = sign / (lam^2 + |xi|^2)."""
    return KernelSpec("yukawa3d", sign=sign, lam=lam)


def exponential1d(sign: float = 1.0, lam: float = 1.0) -> KernelSpec:
    """K(x) = sign * exp(-lam |x|) in one dimension."""
    return KernelSpec("exponential1d", sign=sign, lam=lam)


def custom_kernel(multiplier: Callable[[np.ndarray], np.ndarray]) -> KernelSpec:
    return KernelSpec("custom", multiplier=multiplier)


def multiplier_at(kernel: KernelSpec, xi: Sequence[float]) -> float:
    """K_hat at a single frequency vector."""
    xi = np.asarray(xi, dtype=float).reshape(-1, 1)
    return float(kernel.khat(xi)[0])


@dataclass(frozen=True)
class KernelReport:
    sup_khat: float
    sup_weighted: float
    sup_gradient: float
    khat_bounded: bool
    weighted_bounded: bool
    gradient_bounded: bool

    @property
    def passed(self) -> bool:
        """K_hat, (1+|xi|) K_hat and |xi| K_hat are all bounded."""
        return self.khat_bounded and self.weighted_bounded and self.gradient_bounded


def _bounded(values: np.ndarray, inner: np.ndarray, bound: Optional[float]) -> bool:
    full = float(np.max(values))
    core = float(np.max(values[inner]))
    if bound is not None and full > bound:
        return False
    return full <= GROWTH_FACTOR * core or full == 0.0


def verify_kernel_hypothesis(kernel: KernelSpec, grid: Grid, bound: Optional[float] = None) -> KernelReport:
    """Lattice suprema of |K_hat|, (1+|xi|)|K_hat| and |xi||K_hat|.

    A quantity is flagged unbounded when it exceeds ``bound`` or when its
    sup over the full lattice still exceeds the sup over the inner half
    (|xi| <= Nyquist/2) by more than ``GROWTH_FACTOR``.
    """
    values = kernel.khat_on(grid)
    if not np.all(np.isfinite(values)):
        raise KernelHypothesisError(
            f"{kernel.family} kernel multiplier is not finite on the lattice "
            "(too singular, e.g. Coulomb at xi = 0)"
        )
    r = np.sqrt(grid.xi2)
    inner = r <= grid.nyquist / 2
    a = np.abs(values)
    return KernelReport(
        sup_khat=float(a.max()),
        sup_weighted=float(((1 + r) * a).max()),
        sup_gradient=float((r * a).max()),
        khat_bounded=_bounded(a, inner, bound),
        weighted_bounded=_bounded((1 + r) * a, inner, bound),
        gradient_bounded=_bounded(r * a, inner, bound),
    )


def convolve_samples(kernel: KernelSpec, grid: Grid, samples: np.ndarray) -> np.ndarray:
    """K * f for raw physical samples (any leading batch axes)."""
    if kernel.family == "zero":
        return np.zeros(samples.shape, dtype=complex)
    return grid.multiply(samples, kernel.symbol(grid))


def convolve(kernel: KernelSpec, f: Field) -> Field:
    """K * f, returned in physical representation."""
    return Field(f.grid, convolve_samples(kernel, f.grid, f.physical()), PHYSICAL)
