"""
Periodic box discretisation and Fourier-multiplier calculus.

The whole space R^d is truncated to the torus [-L/2, L/2)^d sampled at N
points per axis.  Spectral samples approximate the unitary continuous
transform

    f_hat(xi) = (2 pi)^(-d/2) * integral f(x) exp(-i x.xi) dx

by the Riemann sum over the nodes.  This is the only place where the
normalisation is fixed; everything else derives its constants from
``Grid.weight``:

    f_hat[m] = weight * (-1)^m * fftn(f)[m],   weight = (L/N)^d (2 pi)^(-d/2)

The factor (-1)^m accounts for the first node sitting at -L/2 instead of 0.
Frequencies are stored in numpy FFT order, xi_m = (2 pi / L) * m with
m in {-N/2, ..., N/2 - 1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import GridError, NonFiniteError, RepresentationError

PHYSICAL = "physical"
SPECTRAL = "spectral"

Multiplier = Union[Callable[[np.ndarray], np.ndarray], np.ndarray, complex, float]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Dimension, points per axis and box length(s) of a periodic grid."""

    dimension: int
    points: int
    length: Union[float, Sequence[float]]

    def lengths(self) -> tuple[float, ...]:
        if np.ndim(self.length) == 0:
            return (float(self.length),) * self.dimension
        return tuple(float(v) for v in self.length)

    def validate(self) -> None:
        if self.dimension not in (1, 2, 3):
            raise GridError(f"dimension must be 1, 2 or 3, got {self.dimension}")
        if not isinstance(self.points, (int, np.integer)) or not _is_power_of_two(int(self.points)):
            raise GridError(f"points per axis must be a power of two, got {self.points}")
        lengths = self.lengths()
        if len(lengths) != self.dimension:
            raise GridError("need one box length per axis")
        if any(not math.isfinite(v) or v <= 0 for v in lengths):
            raise GridError(f"box length must be positive, got {self.length}")


@dataclass(frozen=True, eq=False)
class Grid:
    """Grid with precomputed nodes and frequency lattice.

    Built by :func:`make_grid`; do not instantiate directly.
    """

    spec: GridSpec
    axes: tuple[np.ndarray, ...]
    freq_axes: tuple[np.ndarray, ...]
    x: np.ndarray
    xi: np.ndarray
    xi2: np.ndarray
    weight: float
    sign: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return self.spec.dimension

    @property
    def n(self) -> int:
        return int(self.spec.points)

    @property
    def lengths(self) -> tuple[float, ...]:
        return self.spec.lengths()

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def cell_volume(self) -> float:
        return float(np.prod([L / self.n for L in self.lengths]))

    @property
    def dual_cell_volume(self) -> float:
        return float(np.prod([2 * np.pi / L for L in self.lengths]))

    @property
    def nyquist(self) -> float:
        """Smallest per-axis Nyquist frequency pi N / L."""
        return min(np.pi * self.n / L for L in self.lengths)

    def same_as(self, other: "Grid") -> bool:
        return self is other or (
            self.d == other.d and self.n == other.n and np.allclose(self.lengths, other.lengths, rtol=0, atol=0)
        )

    def check_same(self, other: "Grid") -> None:
        if not self.same_as(other):
            raise GridError("fields live on different grids")

    # raw array transforms; Field wraps these
    def fft(self, samples: np.ndarray) -> np.ndarray:
        return self.weight * self.sign * np.fft.fftn(samples, axes=tuple(range(-self.d, 0)))

    def ifft(self, hat: np.ndarray) -> np.ndarray:
        return np.fft.ifftn(hat * self.sign, axes=tuple(range(-self.d, 0))) / self.weight

    def coefficients(self, samples: np.ndarray) -> np.ndarray:
        """Fourier-series coefficients c_m with f(x_n) = sum_m c_m exp(i xi_m . x_n)."""
        return self.sign * np.fft.fftn(samples, axes=tuple(range(-self.d, 0))) / self.size

    def multiply(self, samples: np.ndarray, symbol: np.ndarray) -> np.ndarray:
        """Physical samples in, physical samples out; the sign/weight factors cancel."""
        axes = tuple(range(-self.d, 0))
        return np.fft.ifftn(np.fft.fftn(samples, axes=axes) * symbol, axes=axes)

    def dot_xi(self, v: Sequence[float]) -> np.ndarray:
        v = np.asarray(v, dtype=float).reshape(-1)
        if v.size != self.d:
            raise GridError(f"vector of length {v.size} on a {self.d}-d grid")
        return np.tensordot(v, self.xi, axes=1)

    def dot_x(self, v: Sequence[float]) -> np.ndarray:
        v = np.asarray(v, dtype=float).reshape(-1)
        if v.size != self.d:
            raise GridError(f"vector of length {v.size} on a {self.d}-d grid")
        return np.tensordot(v, self.x, axes=1)

    def gradient(self, samples: np.ndarray) -> list[np.ndarray]:
        axes = tuple(range(-self.d, 0))
        hat = np.fft.fftn(samples, axes=axes)
        return [np.fft.ifftn(1j * self.xi[n] * hat, axes=axes) for n in range(self.d)]

    def laplacian(self, samples: np.ndarray) -> np.ndarray:
        return self.multiply(samples, -self.xi2)

    def l2_norm(self, samples: np.ndarray) -> float:
        return float(np.sqrt(np.sum(np.abs(samples) ** 2) * self.cell_volume))

    def periodic_offset(self, center: Sequence[float]) -> np.ndarray:
        """x - center wrapped into [-L/2, L/2) per axis, shape (d, *shape)."""
        c = np.asarray(center, dtype=float).reshape(-1)
        out = np.empty_like(self.x)
        for n, L in enumerate(self.lengths):
            out[n] = (self.x[n] - c[n] + L / 2) % L - L / 2
        return out


def make_grid(spec: GridSpec) -> Grid:
    """Validate ``spec`` and precompute nodes and the frequency lattice."""
    spec.validate()
    n = int(spec.points)
    d = spec.dimension
    lengths = spec.lengths()
    axes = tuple(-L / 2 + L * np.arange(n) / n for L in lengths)
    freq_axes = tuple(2 * np.pi * np.fft.fftfreq(n, d=1.0 / n) / L for L in lengths)
    x = np.array(np.meshgrid(*axes, indexing="ij"))
    xi = np.array(np.meshgrid(*freq_axes, indexing="ij"))
    xi2 = np.sum(xi**2, axis=0)
    m = np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(int)
    sign1 = np.where(m % 2 == 0, 1.0, -1.0)
    sign = np.ones((n,) * d)
    for ax in range(d):
        shape = [1] * d
        shape[ax] = n
        sign = sign * sign1.reshape(shape)
    weight = float(np.prod([L / n for L in lengths]) * (2 * np.pi) ** (-d / 2))
    return Grid(spec, axes, freq_axes, x, xi, xi2, weight, sign)


def resolve_points(
    length: float,
    carrier: float,
    sigma: float,
    n_sigma: float = 8.0,
    safety: float = 2.0,
    max_points: int = 1 << 20,
) -> int:
    """Smallest power of two N with pi N / L >= safety * (carrier + n_sigma * sigma).

    ``carrier`` is max_j |k_j| / eps and ``sigma`` the spectral standard
    deviation of the widest amplitude profile.
    """
    target = safety * (carrier + n_sigma * sigma)
    n = 2
    while np.pi * n / length < target:
        n *= 2
        if n > max_points:
            raise GridError(f"resolution rule needs more than {max_points} points")
    return n


@dataclass
class Field:
    """Complex samples on a grid, tagged with their representation."""

    grid: Grid
    samples: np.ndarray
    representation: str = PHYSICAL

    def __post_init__(self) -> None:
        if self.representation not in (PHYSICAL, SPECTRAL):
            raise RepresentationError(f"unknown representation {self.representation!r}")
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != self.grid.shape:
            raise GridError(f"samples of shape {self.samples.shape} on grid of shape {self.grid.shape}")

    def physical(self) -> np.ndarray:
        """Physical samples, transforming if needed."""
        if self.representation == PHYSICAL:
            return self.samples
        return self.grid.ifft(self.samples)

    def spectral(self) -> np.ndarray:
        if self.representation == SPECTRAL:
            return self.samples
        return self.grid.fft(self.samples)

    def to(self, representation: str) -> "Field":
        if representation == self.representation:
            return self
        return transform(self, "forward" if representation == SPECTRAL else "inverse")

    def __add__(self, other: "Field") -> "Field":
        self.grid.check_same(other.grid)
        return Field(self.grid, self.physical() + other.physical())

    def __sub__(self, other: "Field") -> "Field":
        self.grid.check_same(other.grid)
        return Field(self.grid, self.physical() - other.physical())

    def __mul__(self, c: complex) -> "Field":
        return Field(self.grid, self.samples * c, self.representation)

    __rmul__ = __mul__


def transform(f: Field, direction: str) -> Field:
    """Forward (physical -> spectral) or inverse (spectral -> physical) transform."""
    if direction == "forward":
        if f.representation != PHYSICAL:
            raise RepresentationError("forward transform needs a physical field")
        return Field(f.grid, f.grid.fft(f.samples), SPECTRAL)
    if direction == "inverse":
        if f.representation != SPECTRAL:
            raise RepresentationError("inverse transform needs a spectral field")
        return Field(f.grid, f.grid.ifft(f.samples), PHYSICAL)
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def sample_multiplier(grid: Grid, m: Multiplier) -> np.ndarray:
    """Evaluate a multiplier on the lattice and reject non-finite values."""
    if callable(m):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            values = m(grid.xi)
    else:
        values = m
    values = np.broadcast_to(np.asarray(values), grid.shape)
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("multiplier is not finite at every lattice point")
    return values


def apply_multiplier(f: Field, m: Multiplier, representation: str | None = None) -> Field:
    """Multiply spectral coefficients by m(xi).

    ``m`` is either a callable receiving the (d, *shape) frequency array or
    precomputed lattice samples.  The result is returned in
    ``representation`` (default: that of ``f``).
    """
    values = sample_multiplier(f.grid, m)
    out = Field(f.grid, f.spectral() * values, SPECTRAL)
    return out.to(representation or f.representation)


def translate(f: Field, v: Sequence[float]) -> Field:
    """Samples of x -> f(x - v) by spectral interpolation."""
    v = np.asarray(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise NonFiniteError("translation vector is not finite")
    return apply_multiplier(f, np.exp(-1j * f.grid.dot_xi(v)))


def l2_norm(f: Field) -> float:
    if f.representation == SPECTRAL:
        return float(np.sqrt(np.sum(np.abs(f.samples) ** 2) * f.grid.dual_cell_volume))
    return f.grid.l2_norm(f.samples)
