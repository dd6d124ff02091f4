import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_rv.numerics import (
    GridSpec,
    McEstimate,
    bessel_k0,
    integrate_1d,
    integrate_2d,
    mc_mean,
    trapezoid_weights,
)


def k0_by_quadrature(x):
    t = math.acosh(1 + 40 / x)
    return 0.5 * integrate_1d(lambda u: np.exp(-x * np.cosh(u)), GridSpec(-t, t, 4001)).value


class TestGridSpec:
    @pytest.mark.parametrize("lo,hi,n", [(0, 1, 4), (1, 0, 5), (0, 0, 5), (0, 1, 1), (0, math.inf, 5)])
    def test_rejects(self, lo, hi, n):
        with pytest.raises(ValueError):
            GridSpec(lo, hi, n)

    def test_symmetric_grid_is_bitwise_symmetric(self):
        g = GridSpec(-8.005, 8.005, 1601)
        p = g.points
        assert np.array_equal(p, -p[::-1])
        assert p[800] == 0.0

    def test_symmetric_constructor(self):
        g = GridSpec.symmetric(6.0, 0.02)
        assert (g.lo, g.hi, g.n) == (-6.0, 6.0, 601)

    def test_weights_sum_to_length(self):
        g = GridSpec(-2.0, 3.0, 11)
        assert g.weights().sum() == pytest.approx(5.0, abs=1e-15)
        assert np.array_equal(trapezoid_weights(3, 2.0), [1.0, 2.0, 1.0])


class TestIntegrate1d:
    def test_gaussian(self):
        r = integrate_1d(lambda x: np.exp(-x * x / 2) / math.sqrt(2 * math.pi), GridSpec(-6, 6, 601))
        # the mass beyond |x| = 6 is 2e-9, so the oracle is erf, not 1
        assert abs(r.value - math.erf(6 / math.sqrt(2))) <= 1e-9
        assert abs(r.value - 1) <= 1e-8
        assert r.error <= 1e-8

    def test_gaussian_wide(self):
        r = integrate_1d(lambda x: np.exp(-x * x / 2) / math.sqrt(2 * math.pi), GridSpec(-9, 9, 601))
        assert abs(r.value - 1) <= 1e-9

    def test_odd_function(self):
        r = integrate_1d(lambda x: x**3 * np.exp(-x * x), GridSpec(-5, 5, 501))
        assert abs(r.value) <= 1e-12

    def test_exp_map(self):
        r = integrate_1d(lambda x: np.exp(-x), GridSpec(-40.0, math.log(60.0), 2001), map="exp")
        assert abs(r.value - 1) <= 1e-8

    def test_non_finite_reports_location(self):
        with np.errstate(divide="ignore"), pytest.raises(ValueError, match=r"not finite at \(0.0,\)"):
            integrate_1d(lambda x: 1 / x, GridSpec(-1, 1, 5))

    def test_unknown_map(self):
        with pytest.raises(ValueError):
            integrate_1d(lambda x: x, GridSpec(0, 1, 3), map="log")

    @settings(max_examples=50, deadline=None)
    @given(a=st.floats(-10, 10), b=st.floats(-10, 10), lo=st.floats(-5, 4), width=st.floats(0.1, 5),
           n=st.integers(1, 200))
    def test_exact_for_linear(self, a, b, lo, width, n):
        hi = lo + width
        r = integrate_1d(lambda x: a + b * x, GridSpec(lo, hi, 2 * n + 1))
        exact = a * (hi - lo) + 0.5 * b * (hi * hi - lo * lo)
        assert abs(r.value - exact) <= 1e-13 * max(1.0, abs(a) + abs(b)) * max(1.0, hi * hi + lo * lo)


class TestIntegrate2d:
    def test_product_gaussian(self):
        g = GridSpec(-7, 7, 281)
        r = integrate_2d(lambda x, y: np.exp(-(x * x + y * y) / 2) / (2 * math.pi), g, g)
        assert abs(r.value - 1) <= 1e-10

    def test_ij_orientation(self):
        gx = GridSpec(0, 1, 3)
        gy = GridSpec(0, 2, 5)
        assert integrate_2d(lambda x, y: y, gx, gy).value == pytest.approx(2.0)
        assert integrate_2d(lambda x, y: x, gx, gy).value == pytest.approx(1.0)


class TestBesselK0:
    def test_k0_at_one(self):
        assert abs(bessel_k0(1.0) - 0.42102443824070834) <= 1e-12

    @pytest.mark.parametrize("x", [1e-3, 0.05, 0.7, 1.0, 1.9999, 2.0, 3.3, 10.0, 35.0, 50.0])
    def test_against_integral_representation(self, x):
        assert abs(bessel_k0(x) / k0_by_quadrature(x) - 1) <= 1e-12

    def test_small_x_limit(self):
        x = 1e-4
        assert abs(bessel_k0(x) - (-math.log(x / 2) - np.euler_gamma)) <= 1e-6

    def test_monotone(self):
        assert bessel_k0(1.0) > bessel_k0(2.0) > bessel_k0(3.0)

    def test_vector_input(self):
        x = np.array([[0.5, 1.0], [2.0, 4.0]])
        out = bessel_k0(x)
        assert out.shape == (2, 2) and out[0, 1] == bessel_k0(1.0)

    @pytest.mark.parametrize("x", [0.0, -1.0, math.nan])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            bessel_k0(x)


def _normal_pairs(rho, s1, s2):
    def sampler(rng, n):
        z = rng.standard_normal((n, 2))
        return s1 * z[:, 0], s2 * (rho * z[:, 0] + math.sqrt(1 - rho * rho) * z[:, 1])
    return sampler


class TestMcMean:
    def test_constant(self):
        est = mc_mean(_normal_pairs(0, 1, 1), lambda xs: np.ones_like(xs[0]), 1000, 1)
        assert est.mean == 1.0 and est.std_error == 0.0

    def test_marginal_mean_clt_bound(self):
        n = 10**6
        est = mc_mean(_normal_pairs(0, 1, 1), lambda xs: xs[0], n, 7)
        assert abs(est.mean) <= 4 / math.sqrt(n)

    def test_product_moment(self):
        est = mc_mean(_normal_pairs(0.5, 1, 2), lambda xs: xs[0] * xs[1], 10**6, 2024)
        assert est.within(1.0)

    def test_seed_reproducible(self):
        a = mc_mean(_normal_pairs(0.3, 1, 1), lambda xs: xs[0] * xs[1], 5000, 9)
        b = mc_mean(_normal_pairs(0.3, 1, 1), lambda xs: xs[0] * xs[1], 5000, 9)
        assert a == b

    def test_minimum_n(self):
        with pytest.raises(ValueError):
            mc_mean(_normal_pairs(0, 1, 1), lambda xs: xs[0], 99, 0)

    def test_within(self):
        assert McEstimate(1.0, 0.1, 100, 0).within(1.39)
        assert not McEstimate(1.0, 0.1, 100, 0).within(1.41)
