"""Brute-force Neyman-structure test for three variables.

For ``p = 3`` the conditional law of one off-diagonal entry ``s_ij`` of the
sample covariance, given all other entries, has density proportional to
``det(S) ** ((n - p - 2) / 2)`` on the interval where ``S`` stays positive
definite (under the null ``rho_ij = 0``). The UMPU test rejects outside
``(c1, c2)`` where

* the mass of ``[c1, c2]`` is ``1 - alpha`` of the total, and
* the first moment of ``s_ij`` over the two tails is ``alpha`` times its
  first moment over the whole interval.

This module solves those two equations by adaptive quadrature and root
finding, with no use of the beta-distribution shortcut, so it can serve as an
independent check on :func:`ggms.edgetest.edge_test`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .covariance import CovarianceMatrix, partial_correlations
from .edgetest import edge_test, make_config
from .simulation import stream_generator

QUAD_RTOL = 1e-10


class InfeasibleSliceError(ValueError):
    """Fixed entries admit no positive definite completion."""


class OracleError(ArithmeticError):
    """Quadrature or root finding failed."""


@dataclass(frozen=True)
class ConditionalSlice:
    """A 3x3 symmetric matrix with the ``(i, j)`` entry left free."""

    matrix: np.ndarray
    pair: tuple[int, int]

    def __post_init__(self):
        s = np.array(self.matrix, dtype=float)
        if s.shape != (3, 3) or not np.array_equal(s, s.T):
            raise ValueError("slice needs a symmetric 3x3 matrix")
        i, j = self.pair
        if i == j or not (0 <= i < 3 and 0 <= j < 3):
            raise ValueError(f"invalid pair {self.pair}")
        s.setflags(write=False)
        object.__setattr__(self, "matrix", s)
        object.__setattr__(self, "pair", (min(i, j), max(i, j)))

    @property
    def other(self) -> int:
        return 3 - sum(self.pair)

    def det_coefficients(self) -> tuple[float, float, float]:
        """``(c2, c1, c0)`` with ``det S(x) = c2 x**2 + c1 x + c0`` for ``x = s_ij``."""
        i, j = self.pair
        k = self.other
        s = self.matrix
        return (
            -s[k, k],
            2.0 * s[i, k] * s[j, k],
            s[i, i] * s[j, j] * s[k, k] - s[i, i] * s[j, k] ** 2 - s[j, j] * s[i, k] ** 2,
        )

    def det(self, x: float) -> float:
        c2, c1, c0 = self.det_coefficients()
        return (c2 * x + c1) * x + c0

    def with_value(self, x: float) -> np.ndarray:
        s = self.matrix.copy()
        i, j = self.pair
        s[i, j] = s[j, i] = x
        return s


def pd_interval(sl: ConditionalSlice) -> tuple[float, float]:
    """Open interval of ``s_ij`` values keeping the matrix positive definite."""
    c2, c1, c0 = sl.det_coefficients()
    s = sl.matrix
    i, j = sl.pair
    k = sl.other
    if s[k, k] <= 0 or s[i, i] <= 0 or s[j, j] <= 0:
        raise InfeasibleSliceError("diagonal entries must be positive")
    disc = c1 * c1 - 4.0 * c2 * c0
    if not disc > 0:
        raise InfeasibleSliceError(f"no positive definite completion (discriminant {disc:.3g})")
    root = math.sqrt(disc)
    # numerically stable pair of roots
    qv = -0.5 * (c1 + math.copysign(root, c1))
    r1 = qv / c2
    r2 = c0 / qv if qv != 0 else -r1
    lo, hi = min(r1, r2), max(r1, r2)
    mid = 0.5 * (lo + hi)
    if not sl.det(mid) > 0:
        raise InfeasibleSliceError("determinant not positive inside the interval")
    return lo, hi


class _Weights:
    """Quadrature of ``det**e`` and ``x * det**e`` over sub-intervals of the slice.

    With ``det = s_kk (x - lo) (hi - x)`` any factor ``(x - lo)**e`` or
    ``(hi - x)**e`` touching an integration limit is passed to QUADPACK as an
    algebraic end-point weight. That keeps the integrals accurate when ``e``
    is negative (``n = 4``) and the density blows up at the interval ends.
    """

    def __init__(self, sl: ConditionalSlice, n: int):
        self.lo, self.hi = pd_interval(sl)
        self.exponent = (n - 3 - 2) / 2.0
        self.lead = sl.matrix[sl.other, sl.other]
        self._total = None

    def density(self, x: float) -> float:
        d = self.lead * (x - self.lo) * (self.hi - x)
        return d ** self.exponent if d > 0 else 0.0

    def _quad(self, g, a: float, b: float, epsabs: float = 0.0) -> float:
        """``int_a^b g(x) det(x)**e dx`` for ``lo <= a <= b <= hi``."""
        if b <= a:
            return 0.0
        e, lo, hi = self.exponent, self.lo, self.hi
        at_lo, at_hi = a <= lo, b >= hi
        a, b = max(a, lo), min(b, hi)

        def smooth(x):
            v = self.lead ** e * g(x)
            if not at_lo:
                v *= (x - lo) ** e
            if not at_hi:
                v *= (hi - x) ** e
            return v

        opts = dict(epsabs=epsabs, epsrel=QUAD_RTOL, limit=200, full_output=1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            if at_lo or at_hi:
                wvar = (e if at_lo else 0.0, e if at_hi else 0.0)
                out = integrate.quad(smooth, a, b, weight="alg", wvar=wvar, **opts)
            else:
                out = integrate.quad(smooth, a, b, **opts)
        if len(out) > 3:
            raise OracleError(f"quadrature did not converge on [{a}, {b}]: {out[3]}")
        return out[0]

    def mass(self, a: float, b: float) -> float:
        return self._quad(lambda x: 1.0, a, b)

    def moment(self, a: float, b: float) -> float:
        # first moments can cancel to ~0, so relative accuracy alone is unattainable
        floor = 1e-3 * QUAD_RTOL * self.total * max(abs(self.lo), abs(self.hi))
        return self._quad(lambda x: x, a, b, epsabs=floor)

    def abs_moment(self) -> float:
        return self._quad(abs, self.lo, self.hi)

    @property
    def total(self) -> float:
        if self._total is None:
            self._total = self.mass(self.lo, self.hi)
        return self._total


def _upper_for(w: _Weights, c1: float, alpha: float) -> float:
    """``c2`` such that ``[c1, c2]`` carries ``1 - alpha`` of the mass."""
    target = (1.0 - alpha) * w.total
    xtol = 1e-15 * (w.hi - w.lo)
    if w.mass(c1, w.hi) <= target:
        return w.hi
    return optimize.brentq(lambda c2: w.mass(c1, c2) - target, c1, w.hi, xtol=xtol, rtol=1e-15)


def critical_values(sl: ConditionalSlice, n: int, alpha: float) -> tuple[float, float]:
    """Critical values ``(c1, c2)`` of the conditional two-sided test of ``s_ij``."""
    if n <= 3:
        raise ValueError(f"need n > 3, got {n}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    w = _Weights(sl, n)
    xtol = 1e-15 * (w.hi - w.lo)
    m_all = w.moment(w.lo, w.hi)

    # the largest c1 still leaving room for 1 - alpha of the mass above it
    c1_max = optimize.brentq(
        lambda c: w.mass(w.lo, c) - alpha * w.total, w.lo, w.hi, xtol=xtol, rtol=1e-15
    )

    def moment_residual(c1: float) -> float:
        c2 = _upper_for(w, c1, alpha)
        return w.moment(w.lo, c1) + w.moment(c2, w.hi) - alpha * m_all

    g_lo, g_hi = moment_residual(w.lo), moment_residual(c1_max)
    if g_lo == 0:
        c1 = w.lo
    elif g_hi == 0:
        c1 = c1_max
    elif g_lo * g_hi > 0:
        raise OracleError("moment condition has no sign change on the admissible range")
    else:
        c1 = optimize.brentq(moment_residual, w.lo, c1_max, xtol=xtol, rtol=1e-15)
    return c1, _upper_for(w, c1, alpha)


def residuals(sl: ConditionalSlice, n: int, alpha: float, c1: float, c2: float) -> tuple[float, float]:
    """Normalized residuals of the size and first-moment conditions at ``(c1, c2)``."""
    w = _Weights(sl, n)
    size = w.mass(c1, c2) / w.total - (1.0 - alpha)
    moment = (w.moment(w.lo, c1) + w.moment(c2, w.hi) - alpha * w.moment(w.lo, w.hi)) / w.abs_moment()
    return size, moment


def oracle_decision(s, n: int, alpha: float, pair: tuple[int, int]) -> int:
    """Neyman-structure decision for ``s_ij``: 0 iff ``c1 < s_ij < c2``."""
    sl = ConditionalSlice(np.asarray(s, dtype=float), pair)
    c1, c2 = critical_values(sl, n, alpha)
    x = sl.matrix[sl.pair]
    return int(not (c1 < x < c2))


@dataclass
class OracleCheck:
    samples: int
    n: int
    alpha: float
    seed: int
    agreements: int
    threshold: float
    disagreement_distances: list
    min_distance: float

    @property
    def agreement_rate(self) -> float:
        return self.agreements / self.samples

    @property
    def max_boundary_distance(self) -> float:
        """Largest ``||r| - t|`` among disagreements (0 when there are none)."""
        return max(self.disagreement_distances, default=0.0)


def wishart_sample(n: int, seed: int, stream: int) -> np.ndarray:
    """Sample covariance (1/n) of ``n`` standard normal observations in three dimensions."""
    x = stream_generator(seed, stream).standard_normal((3, n))
    xc = x - x.mean(axis=1, keepdims=True)
    s = xc @ xc.T / n
    return (s + s.T) / 2


def check_agreement(samples: int, n: int, alpha: float, seed: int) -> OracleCheck:
    """Compare :func:`oracle_decision` with the beta-threshold test on random matrices.

    Matrix ``k`` tests the pair ``k mod 3`` among ``(0, 1), (0, 2), (1, 2)``.
    """
    pairs = [(0, 1), (0, 2), (1, 2)]
    cfg = make_config(n, 3, alpha)
    agree = 0
    dists = []
    min_dist = math.inf
    for k in range(samples):
        s = wishart_sample(n, seed, k)
        i, j = pairs[k % 3]
        r = float(partial_correlations(CovarianceMatrix(s)).values[i, j])
        dist = abs(abs(r) - cfg.threshold)
        min_dist = min(min_dist, dist)
        if oracle_decision(s, n, alpha, (i, j)) == edge_test(r, cfg):
            agree += 1
        else:
            dists.append(dist)
    return OracleCheck(samples, n, alpha, seed, agree, cfg.threshold, dists, min_dist)
