import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ggms import BetaParams, beta_cdf, beta_quantile
from ggms.beta import beta_pdf

from oracles import quad_cdf

SHAPES = [0.5, 1.0, 2.5, 10.0, 50.0]
PROBS = [1e-6, 1e-5, 1e-4, 1e-3, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.975, 0.99,
         1 - 1e-3, 1 - 1e-4, 1 - 1e-5, 1 - 1e-6]


def ulp_slack(q, params):
    # best attainable |cdf(q) - p| when q is rounded to a double
    return beta_pdf(q, params) * math.ulp(q)


class TestBetaCdf:
    @pytest.mark.parametrize("m", SHAPES)
    def test_endpoints(self, m):
        assert beta_cdf(0.0, BetaParams(m, 2 * m)) == 0.0
        assert beta_cdf(1.0, BetaParams(m, 2 * m)) == 1.0

    @pytest.mark.parametrize("x", np.linspace(0, 1, 21))
    def test_uniform(self, x):
        assert beta_cdf(x, BetaParams(1, 1)) == pytest.approx(x, abs=1e-15)

    def test_arcsine_quarter(self):
        assert beta_cdf(0.25, BetaParams(0.5, 0.5)) == pytest.approx(1 / 3, abs=1e-15)

    @pytest.mark.parametrize("x", [1e-8, 0.01, 0.3, 0.5, 0.77, 0.999])
    def test_arcsine_law(self, x):
        assert beta_cdf(x, BetaParams(0.5, 0.5)) == pytest.approx(2 / math.pi * math.asin(math.sqrt(x)), abs=1e-13)

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.5, 7.5, 22.5, 50.0])
    @pytest.mark.parametrize("b", [0.5, 3.0, 7.5, 50.0])
    def test_against_quadrature(self, a, b):
        for x in (0.001, 0.05, 0.2, 0.5, 0.8, 0.95, 0.999):
            assert beta_cdf(x, BetaParams(a, b)) == pytest.approx(quad_cdf(x, a, b), abs=1e-9)

    @pytest.mark.parametrize("a,b", [(0.5, 0.5), (2.5, 2.5), (50, 50), (0.7, 13.0), (31.0, 1.5)])
    def test_against_high_precision(self, a, b):
        for x in (1e-4, 0.1, 0.45, 0.5, 0.62, 0.9, 0.9999):
            ref = float(mpmath.betainc(a, b, 0, x, regularized=True))
            assert beta_cdf(x, BetaParams(a, b)) == pytest.approx(ref, abs=1e-13)

    def test_domain(self):
        with pytest.raises(ValueError):
            beta_cdf(1.5, BetaParams(1, 1))
        with pytest.raises(ValueError):
            BetaParams(0.0, 1.0)


class TestBetaQuantile:
    @pytest.mark.parametrize("m", SHAPES)
    def test_median_of_symmetric(self, m):
        assert beta_quantile(0.5, BetaParams(m, m)) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("p", PROBS)
    def test_uniform(self, p):
        assert beta_quantile(p, BetaParams(1, 1)) == pytest.approx(p, abs=1e-15)

    def test_uniform_0025(self):
        assert beta_quantile(0.025, BetaParams(1, 1)) == pytest.approx(0.025, abs=1e-16)

    def test_arcsine_0025(self):
        # sin^2(0.0125 pi) = 1.5413331334360...e-3
        assert beta_quantile(0.025, BetaParams(0.5, 0.5)) == pytest.approx(0.0015413331334360, abs=1e-16)

    @pytest.mark.parametrize("p", PROBS)
    def test_arcsine_closed_form(self, p):
        expected = math.sin(math.pi * p / 2) ** 2
        assert beta_quantile(p, BetaParams(0.5, 0.5)) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("a", SHAPES)
    @pytest.mark.parametrize("b", SHAPES)
    def test_residual(self, a, b):
        params = BetaParams(a, b)
        for p in PROBS:
            q = beta_quantile(p, params)
            assert abs(beta_cdf(q, params) - p) <= max(1e-12, ulp_slack(q, params))

    @pytest.mark.parametrize("m", SHAPES)
    def test_symmetry(self, m):
        params = BetaParams(m, m)
        for p in PROBS:
            assert beta_quantile(p, params) + beta_quantile(1 - p, params) == pytest.approx(1.0, abs=1e-11)

    @pytest.mark.parametrize("m", SHAPES)
    def test_monotone(self, m):
        qs = [beta_quantile(p, BetaParams(m, m)) for p in np.linspace(0.001, 0.999, 400)]
        assert all(b > a for a, b in zip(qs, qs[1:]))

    @settings(max_examples=150, deadline=None)
    @given(st.floats(1e-6, 1 - 1e-6), st.floats(0.5, 60), st.floats(0.5, 60))
    def test_round_trip_property(self, p, a, b):
        params = BetaParams(a, b)
        q = beta_quantile(p, params)
        assert 0 < q < 1
        assert abs(beta_cdf(q, params) - p) <= max(1e-11, ulp_slack(q, params))

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.1])
    def test_domain(self, p):
        with pytest.raises(ValueError):
            beta_quantile(p, BetaParams(2, 2))
