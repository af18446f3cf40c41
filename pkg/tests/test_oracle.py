import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ggms import edge_test, make_config
from ggms.covariance import CovarianceMatrix, partial_correlations
from ggms.oracle import (
    ConditionalSlice,
    InfeasibleSliceError,
    check_agreement,
    critical_values,
    oracle_decision,
    pd_interval,
    residuals,
    wishart_sample,
)


def slice_of(s, pair=(0, 1)):
    return ConditionalSlice(np.asarray(s, dtype=float), pair)


class TestPdInterval:
    def test_identity(self):
        assert pd_interval(slice_of(np.eye(3))) == pytest.approx((-1.0, 1.0), abs=1e-15)

    def test_half_correlations(self):
        s = np.array([[1, 0, 0.5], [0, 1, 0.5], [0.5, 0.5, 1]])
        # det = -x^2 + 0.5 x + 0.5 with roots -0.5 and 1
        lo, hi = pd_interval(slice_of(s))
        assert (lo, hi) == pytest.approx((-0.5, 1.0), abs=1e-15)
        assert slice_of(s).det((lo + hi) / 2) > 0

    def test_degenerate_minor(self):
        s = np.array([[1, 0, 1.0], [0, 1, 0], [1.0, 0, 1]])
        with pytest.raises(InfeasibleSliceError):
            pd_interval(slice_of(s))

    def test_non_positive_diagonal(self):
        with pytest.raises(InfeasibleSliceError):
            pd_interval(slice_of(np.diag([1.0, 1.0, 0.0])))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([(0, 1), (0, 2), (1, 2)]))
    def test_endpoints_are_roots(self, seed, pair):
        s = wishart_sample(10, seed, 0)
        sl = slice_of(s, pair)
        lo, hi = pd_interval(sl)
        scale = np.prod(np.diag(s))
        assert abs(sl.det(lo)) <= 1e-12 * scale and abs(sl.det(hi)) <= 1e-12 * scale
        assert lo < s[pair] < hi
        assert np.all(np.linalg.eigvalsh(sl.with_value((lo + hi) / 2)) > 0)

    def test_invalid_slice(self):
        with pytest.raises(ValueError):
            ConditionalSlice(np.eye(4), (0, 1))
        with pytest.raises(ValueError):
            ConditionalSlice(np.eye(3), (1, 1))


class TestCriticalValues:
    @pytest.mark.parametrize("n,alpha", [(10, 0.05), (6, 0.2), (30, 0.01)])
    def test_symmetric_slice(self, n, alpha):
        c1, c2 = critical_values(slice_of(np.eye(3)), n, alpha)
        assert c1 == pytest.approx(-c2, abs=1e-9)

    def test_identity_matches_beta_threshold(self):
        # on the identity slice s_ij is itself the partial correlation
        c1, c2 = critical_values(slice_of(np.eye(3)), 10, 0.05)
        assert c2 == pytest.approx(make_config(10, 3, 0.05).threshold, abs=1e-9)

    @pytest.mark.parametrize("k", range(6))
    def test_residuals_vanish(self, k):
        s = wishart_sample(10, 77, k)
        sl = slice_of(s, [(0, 1), (0, 2), (1, 2)][k % 3])
        c1, c2 = critical_values(sl, 10, 0.05)
        size, moment = residuals(sl, 10, 0.05, c1, c2)
        assert abs(size) <= 1e-8 and abs(moment) <= 1e-8
        lo, hi = pd_interval(sl)
        assert lo < c1 < c2 < hi

    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_small_n_singular_density(self, n):
        # n = 4 makes the conditional density infinite at both interval ends
        for k in range(3):
            sl = slice_of(wishart_sample(n, 8, k), (0, 2))
            c1, c2 = critical_values(sl, n, 0.05)
            size, moment = residuals(sl, n, 0.05, c1, c2)
            assert abs(size) <= 1e-8 and abs(moment) <= 1e-8
            lo, hi = pd_interval(sl)
            assert (c2 - c1) / (hi - lo) == pytest.approx(make_config(n, 3, 0.05).threshold, abs=1e-9)

    @pytest.mark.parametrize("k", range(4))
    def test_relative_half_width_is_threshold(self, k):
        # r_ij is affine in s_ij with r = -1, 1 at the interval ends, so the
        # acceptance region spans the fraction t of the half-width about the midpoint
        s = wishart_sample(10, 91, k)
        sl = slice_of(s, (0, 1))
        c1, c2 = critical_values(sl, 10, 0.05)
        lo, hi = pd_interval(sl)
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        t = make_config(10, 3, 0.05).threshold
        assert (c2 - mid) / half == pytest.approx(t, abs=1e-9)
        assert (mid - c1) / half == pytest.approx(t, abs=1e-9)

    def test_invalid(self):
        with pytest.raises(ValueError):
            critical_values(slice_of(np.eye(3)), 3, 0.05)
        with pytest.raises(ValueError):
            critical_values(slice_of(np.eye(3)), 10, 1.0)


class TestOracleDecision:
    def test_boundary_rejects(self):
        s = wishart_sample(10, 3, 1)
        sl = slice_of(s, (0, 2))
        c1, c2 = critical_values(sl, 10, 0.05)
        assert oracle_decision(sl.with_value(c1), 10, 0.05, (0, 2)) == 1
        assert oracle_decision(sl.with_value(c2), 10, 0.05, (0, 2)) == 1
        assert oracle_decision(sl.with_value((c1 + c2) / 2), 10, 0.05, (0, 2)) == 0

    @pytest.mark.parametrize("lam", [1e-3, 0.5, 1.0, 7.0, 1e4])
    def test_scale_invariance(self, lam):
        s = wishart_sample(10, 5, 2)
        base = [oracle_decision(s, 10, 0.05, pr) for pr in [(0, 1), (0, 2), (1, 2)]]
        assert [oracle_decision(lam * s, 10, 0.05, pr) for pr in [(0, 1), (0, 2), (1, 2)]] == base

    def test_identity_scaled_accepts(self):
        for lam in (0.1, 1.0, 10.0):
            assert oracle_decision(lam * np.eye(3), 10, 0.05, (0, 1)) == 0

    def test_matches_beta_test_on_random_slices(self):
        n, alpha = 10, 0.05
        cfg = make_config(n, 3, alpha)
        for k in range(30):
            s = wishart_sample(n, 2024, k)
            pair = [(0, 1), (0, 2), (1, 2)][k % 3]
            r = partial_correlations(CovarianceMatrix(s)).values[pair]
            if abs(abs(r) - cfg.threshold) > 1e-6:
                assert oracle_decision(s, n, alpha, pair) == edge_test(r, cfg)

    def test_check_agreement_small(self):
        res = check_agreement(30, 10, 0.05, seed=4)
        assert res.samples == 30 and res.agreement_rate == 1.0
        assert res.max_boundary_distance == 0.0 and res.min_distance > 0
        assert res.threshold == make_config(10, 3, 0.05).threshold


def test_wishart_sample_deterministic():
    a = wishart_sample(10, 1, 2)
    assert np.array_equal(a, wishart_sample(10, 1, 2)) and np.array_equal(a, a.T)
    assert math.isclose(np.trace(np.mean([wishart_sample(10, 1, k) for k in range(2000)], axis=0)), 2.7, rel_tol=0.05)
