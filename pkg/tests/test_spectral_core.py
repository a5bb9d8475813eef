import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hartree_wkb.errors import GridError, NonFiniteError, RepresentationError
from hartree_wkb.property_suites import random_band_limited
from hartree_wkb.spectral_core import (
    PHYSICAL,
    SPECTRAL,
    Field,
    GridSpec,
    apply_multiplier,
    l2_norm,
    make_grid,
    resolve_points,
    transform,
    translate,
)


class TestMakeGrid:
    def test_one_dimensional_lattice(self):
        g = make_grid(GridSpec(1, 8, 2 * np.pi))
        np.testing.assert_allclose(g.axes[0], -np.pi + 2 * np.pi * np.arange(8) / 8, atol=1e-15)
        np.testing.assert_allclose(np.sort(g.freq_axes[0]), np.arange(-4, 4), atol=1e-15)

    def test_two_dimensional_spacing(self):
        g = make_grid(GridSpec(2, 4, 4.0))
        assert g.shape == (4, 4)
        for f in g.freq_axes:
            np.testing.assert_allclose(np.diff(np.sort(f)), 2 * np.pi / 4)

    @pytest.mark.parametrize("spec", [GridSpec(1, 6, 1.0), GridSpec(1, 8, 0.0), GridSpec(1, 8, -1.0),
                                      GridSpec(4, 8, 1.0), GridSpec(0, 8, 1.0)])
    def test_rejects_invalid(self, spec):
        with pytest.raises(GridError):
            make_grid(spec)

    def test_resolution_rule(self):
        # pi N / L >= 2 (128 + 8) with L = 32 pi  ->  N >= 8704
        assert resolve_points(32 * np.pi, 128.0, 1.0) == 16384
        assert resolve_points(32 * np.pi, 8.0, 1.0) == 1024


class TestTransform:
    def test_constant(self):
        L = 10.0
        g = make_grid(GridSpec(1, 64, L))
        hat = transform(Field(g, np.ones(64)), "forward")
        assert hat.representation == SPECTRAL
        assert hat.samples[0] == pytest.approx(L / np.sqrt(2 * np.pi), rel=1e-14)
        assert np.max(np.abs(hat.samples[1:])) < 1e-12

    def test_pure_mode(self):
        g = make_grid(GridSpec(1, 32, 2 * np.pi))
        hat = transform(Field(g, np.exp(3j * g.axes[0])), "forward").samples
        idx = np.argmax(np.abs(hat))
        assert g.freq_axes[0][idx] == 3
        mask = np.ones(32, bool)
        mask[idx] = False
        assert np.max(np.abs(hat[mask])) < 1e-12
        assert abs(hat[idx]) == pytest.approx(2 * np.pi / np.sqrt(2 * np.pi))

    def test_gaussian_matches_continuous_transform(self):
        g = make_grid(GridSpec(1, 1024, 32 * np.pi))
        hat = transform(Field(g, np.exp(-g.axes[0] ** 2 / 2)), "forward").samples
        np.testing.assert_allclose(hat, np.exp(-g.freq_axes[0] ** 2 / 2), atol=1e-8)

    def test_round_trip(self, rng):
        g = make_grid(GridSpec(2, 32, 3.0))
        f = Field(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
        back = transform(transform(f, "forward"), "inverse")
        assert np.max(np.abs(back.samples - f.samples)) <= 1e-12 * np.max(np.abs(f.samples))

    def test_tag_mismatch(self):
        g = make_grid(GridSpec(1, 8, 1.0))
        with pytest.raises(RepresentationError):
            transform(Field(g, np.zeros(8)), "inverse")
        with pytest.raises(RepresentationError):
            transform(Field(g, np.zeros(8), SPECTRAL), "forward")

    @pytest.mark.parametrize("d,n", [(1, 128), (2, 32), (3, 8)])
    def test_parseval(self, d, n):
        g = make_grid(GridSpec(d, n, 5.0))
        rng = np.random.default_rng(d)
        for f in random_band_limited(rng, g, n // 4, 100):
            field = Field(g, f)
            phys = l2_norm(field)
            spectral = l2_norm(field.to(SPECTRAL))
            assert spectral == pytest.approx(phys, rel=1e-10)


class TestMultiplier:
    def test_laplacian_of_pure_mode(self):
        g = make_grid(GridSpec(1, 64, 2 * np.pi))
        f = Field(g, np.exp(5j * g.axes[0]))
        out = apply_multiplier(f, lambda xi: -np.sum(xi**2, axis=0))
        np.testing.assert_allclose(out.samples, -25 * f.samples, atol=1e-11)

    def test_free_group_inverse(self, rng):
        g = make_grid(GridSpec(1, 256, 20.0))
        f = Field(g, random_band_limited(rng, g, 60)[0])
        t, eps = 0.7, 0.1
        fwd = apply_multiplier(f, lambda xi: np.exp(0.5j * t * eps * np.sum(xi**2, axis=0)))
        back = apply_multiplier(fwd, lambda xi: np.exp(-0.5j * t * eps * np.sum(xi**2, axis=0)))
        assert np.max(np.abs(back.samples - f.samples)) < 1e-12

    def test_identity_is_bitwise_in_spectral(self, rng):
        g = make_grid(GridSpec(1, 64, 1.0))
        f = Field(g, rng.standard_normal(64) + 0j, SPECTRAL)
        out = apply_multiplier(f, 1.0)
        assert out.representation == SPECTRAL
        assert np.array_equal(out.samples, f.samples)

    def test_requested_representation(self, rng):
        g = make_grid(GridSpec(1, 64, 1.0))
        f = Field(g, rng.standard_normal(64))
        assert apply_multiplier(f, 2.0, SPECTRAL).representation == SPECTRAL
        assert apply_multiplier(f, 2.0).representation == PHYSICAL

    def test_non_finite_rejected(self):
        g = make_grid(GridSpec(1, 16, 1.0))
        with pytest.raises(NonFiniteError):
            apply_multiplier(Field(g, np.ones(16)), lambda xi: 1 / np.sum(xi**2, axis=0))

    def test_linearity(self, rng):
        g = make_grid(GridSpec(2, 16, 2.0))
        f, h = random_band_limited(rng, g, 4, 2)
        a, b = 0.3 - 1.2j, 2.5
        m = lambda xi: np.exp(-np.sum(xi**2, axis=0) / 50) * (1 + 1j * xi[0])  # noqa: E731
        lhs = apply_multiplier(Field(g, a * f + b * h), m).samples
        rhs = a * apply_multiplier(Field(g, f), m).samples + b * apply_multiplier(Field(g, h), m).samples
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * max(1.0, np.max(np.abs(lhs)))


class TestTranslate:
    def test_full_period(self, rng):
        g = make_grid(GridSpec(1, 64, 3.0))
        f = Field(g, random_band_limited(rng, g, 20)[0])
        np.testing.assert_allclose(translate(f, [3.0]).samples, f.samples, atol=1e-12)

    def test_one_cell_is_index_shift(self, rng):
        g = make_grid(GridSpec(1, 64, 3.0))
        f = Field(g, rng.standard_normal(64) + 1j * rng.standard_normal(64))
        out = translate(f, [3.0 / 64])
        np.testing.assert_allclose(out.samples, np.roll(f.samples, 1), atol=1e-12)

    def test_one_cell_two_dimensional(self, rng):
        g = make_grid(GridSpec(2, 16, 2.0))
        f = Field(g, rng.standard_normal(g.shape))
        out = translate(f, [0.0, 2.0 / 16])
        np.testing.assert_allclose(out.samples, np.roll(f.samples, 1, axis=1), atol=1e-12)

    def test_gaussian_shift_against_closed_form(self):
        g = make_grid(GridSpec(1, 1024, 32 * np.pi))
        x = g.axes[0]
        out = translate(Field(g, np.exp(-x**2 / 2)), [0.3])
        assert np.max(np.abs(out.samples - np.exp(-(x - 0.3) ** 2 / 2))) <= 1e-8

    def test_non_finite_vector(self):
        g = make_grid(GridSpec(1, 8, 1.0))
        with pytest.raises(NonFiniteError):
            translate(Field(g, np.ones(8)), [math.inf])

    @settings(max_examples=30, deadline=None)
    @given(v=st.floats(-100, 100, allow_nan=False))
    def test_inverse_shift(self, v):
        g = make_grid(GridSpec(1, 128, 10.0))
        f = Field(g, random_band_limited(np.random.default_rng(0), g, 40)[0])
        back = translate(translate(f, [v]), [-v])
        assert np.max(np.abs(back.samples - f.samples)) < 1e-10
