import numpy as np
import pytest
from scipy import integrate, optimize

from hartree_wkb.errors import KernelHypothesisError
from hartree_wkb.kernels import (
    constant_kernel,
    convolve,
    custom_kernel,
    exponential1d,
    multiplier_at,
    verify_kernel_hypothesis,
    yukawa3d,
    zero_kernel,
)
from hartree_wkb.property_suites import random_band_limited, young_bound
from hartree_wkb.spectral_core import Field, GridSpec, make_grid, translate


@pytest.fixture(scope="module")
def cube():
    # L = 2 pi puts the lattice on the integers, so |xi| = 1 is a node
    return make_grid(GridSpec(3, 16, 2 * np.pi))


class TestMultiplierAt:
    def test_yukawa_origin(self):
        assert multiplier_at(yukawa3d(1, 1.0), [0, 0, 0]) == 1.0

    def test_attractive_yukawa(self):
        assert multiplier_at(yukawa3d(-1, 2.0), [0, 2.0, 0]) == pytest.approx(-0.125, abs=1e-15)

    @pytest.mark.parametrize("xi", [[0.0], [3.5], [-100.0]])
    def test_zero(self, xi):
        assert multiplier_at(zero_kernel(), xi) == 0.0

    def test_exponential_origin(self):
        assert multiplier_at(exponential1d(1, 2.0), [0.0]) == pytest.approx(np.sqrt(2 / np.pi) / 2)

    @pytest.mark.parametrize("sign,lam", [(0.5, 1.0), (1, 0.0), (1, -1.0)])
    def test_invalid_parameters(self, sign, lam):
        with pytest.raises(ValueError):
            yukawa3d(sign, lam)


class TestHypothesis:
    def test_yukawa_suprema(self, cube):
        rep = verify_kernel_hypothesis(yukawa3d(1, 1.0), cube)
        peak = -optimize.minimize_scalar(lambda r: -r / (1 + r * r), bounds=(0, 10), method="bounded").fun
        assert rep.sup_khat == pytest.approx(1.0)
        assert rep.sup_gradient == pytest.approx(peak, abs=1e-8)
        assert peak == pytest.approx(0.5, abs=1e-8)
        assert rep.passed

    def test_constant_kernel(self, cube):
        rep = verify_kernel_hypothesis(constant_kernel(2.0), cube)
        assert rep.khat_bounded
        assert not rep.weighted_bounded
        assert not rep.gradient_bounded
        assert not rep.passed

    def test_zero_kernel(self, cube):
        rep = verify_kernel_hypothesis(zero_kernel(), cube)
        assert (rep.sup_khat, rep.sup_weighted, rep.sup_gradient) == (0.0, 0.0, 0.0)
        assert rep.passed

    def test_configured_bound(self, cube):
        assert not verify_kernel_hypothesis(yukawa3d(1, 1.0), cube, bound=0.9).khat_bounded

    def test_coulomb_rejected(self, cube):
        with pytest.raises(KernelHypothesisError):
            verify_kernel_hypothesis(custom_kernel(lambda xi: 1 / np.sum(xi**2, axis=0)), cube)

    def test_exponential_passes(self):
        g = make_grid(GridSpec(1, 1024, 32 * np.pi))
        assert verify_kernel_hypothesis(exponential1d(-1, 0.5), g).passed


class TestConvolve:
    def test_delta_kernel(self, rng):
        g = make_grid(GridSpec(2, 32, 4.0))
        delta = custom_kernel(lambda xi: np.full(xi.shape[1:], (2 * np.pi) ** -1.0))
        f = Field(g, random_band_limited(rng, g, 10)[0])
        assert np.max(np.abs(convolve(delta, f).samples - f.samples)) < 1e-12

    def test_zero_kernel(self, rng):
        g = make_grid(GridSpec(1, 64, 4.0))
        out = convolve(zero_kernel(), Field(g, rng.standard_normal(64)))
        assert not np.any(out.samples)

    def test_exponential_against_quadrature(self):
        g = make_grid(GridSpec(1, 2048, 32 * np.pi))
        x = g.axes[0]
        out = convolve(exponential1d(1, 1.0), Field(g, np.exp(-x**2 / 2))).samples
        idx = np.linspace(0, g.n - 1, 16).astype(int)
        idx = idx[np.abs(x[idx]) < 15]
        idx = np.unique(np.concatenate([idx, np.searchsorted(x, np.linspace(-6, 6, 16))]))[:16]
        assert len(idx) == 16
        for i in idx:
            xi = x[i]
            f = lambda y: np.exp(-abs(xi - y)) * np.exp(-y * y / 2)  # noqa: E731
            ref = integrate.quad(f, -np.inf, xi, epsabs=0, epsrel=1e-13)[0]
            ref += integrate.quad(f, xi, np.inf, epsabs=0, epsrel=1e-13)[0]
            assert abs(out[i] - ref) <= 1e-6 * abs(ref)

    def test_commutes_with_translation(self, rng):
        g = make_grid(GridSpec(1, 256, 20.0))
        K = exponential1d(-1, 0.7)
        f = Field(g, random_band_limited(rng, g, 50)[0])
        lhs = convolve(K, translate(f, [1.37])).samples
        rhs = translate(convolve(K, f), [1.37]).samples
        assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_real_output(self, rng):
        g = make_grid(GridSpec(3, 16, 2 * np.pi))
        f = Field(g, rng.standard_normal(g.shape))
        out = convolve(yukawa3d(1, 1.5), f).samples
        assert np.max(np.abs(out.imag)) <= 1e-10 * g.l2_norm(f.samples)

    def test_linear(self, rng):
        g = make_grid(GridSpec(1, 128, 10.0))
        K = exponential1d(1, 1.0)
        f, h = random_band_limited(rng, g, 30, 2)
        lhs = convolve(K, Field(g, 2 * f - 1j * h)).samples
        rhs = 2 * convolve(K, Field(g, f)).samples - 1j * convolve(K, Field(g, h)).samples
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_young_bound(self):
        res = young_bound(100, seed=7)
        assert res.checks == 100
        assert res.passed, res.line()
