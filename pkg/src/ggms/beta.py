"""Regularized incomplete beta function and its inverse.

Scalar, pure-Python kernels. ``beta_cdf`` evaluates the continued fraction
for I_x(a, b) with the modified Lentz method; ``beta_quantile`` inverts it
with Newton steps kept inside a shrinking bisection bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_EPS = 2.220446049250313e-16
_TINY = 1e-300
_MAX_TERMS = 100_000


class ConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters of a beta distribution."""

    m1: float
    m2: float

    def __post_init__(self):
        for name in ("m1", "m2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"beta shape {name} must be finite and positive, got {v}")

    @classmethod
    def symmetric(cls, m: float) -> "BetaParams":
        return cls(m, m)


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _continued_fraction(x: float, a: float, b: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_TERMS + 1):
        m2 = 2 * m
        # even step
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        # odd step
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= _EPS:
            return h
    raise ConvergenceError(f"continued fraction did not converge for x={x}, a={a}, b={b}")


def _lower_tail(x: float, a: float, b: float) -> float:
    # I_x(a, b) through the continued fraction; accurate for x < (a + 1) / (a + b + 2)
    log_front = a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b)
    return math.exp(log_front) * _continued_fraction(x, a, b) / a


def beta_cdf(x: float, params: BetaParams) -> float:
    """Regularized incomplete beta function I_x(m1, m2)."""
    a, b = params.m1, params.m2
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    if x < (a + 1.0) / (a + b + 2.0):
        return _lower_tail(x, a, b)
    return 1.0 - _lower_tail(1.0 - x, b, a)


def beta_pdf(x: float, params: BetaParams) -> float:
    a, b = params.m1, params.m2
    if not 0.0 < x < 1.0:
        return 0.0
    return math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - _log_beta(a, b))


def _quantile_lower(prob: float, a: float, b: float) -> float:
    params = BetaParams(a, b)
    log_b = _log_beta(a, b)

    # power-law tail guess I_x ~ x^a / (a B(a, b)), else the mean
    x = math.exp((math.log(prob) + math.log(a) + log_b) / a)
    mean = a / (a + b)
    if not 0.0 < x < mean:
        x = mean
    lo, hi = 0.0, 1.0
    best_x, best_f = x, math.inf
    prev_f = math.inf
    for _ in range(2000):
        f = beta_cdf(x, params) - prob
        if abs(f) < abs(best_f):
            best_x, best_f = x, f
        if f == 0.0:
            return x
        if f < 0.0:
            lo = x
        else:
            hi = x
        if hi - lo <= 2 * _EPS * hi:
            break
        dens = math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - log_b)
        step = f / dens if dens > 0 else math.inf
        cand = x - step
        if not (lo < cand < hi) or abs(f) > 0.5 * abs(prev_f):
            cand = 0.5 * (lo + hi)
        prev_f = f
        if cand == x:
            break
        x = cand
    else:
        raise ConvergenceError(f"beta quantile did not converge for p={prob}, a={a}, b={b}")
    # polish: the representable neighbours of the root
    for cand in (lo, hi, math.nextafter(best_x, 0.0), math.nextafter(best_x, 1.0)):
        if 0.0 < cand < 1.0:
            f = beta_cdf(cand, params) - prob
            if abs(f) < abs(best_f):
                best_x, best_f = cand, f
    return best_x


def beta_quantile(prob: float, params: BetaParams) -> float:
    """Value ``q`` with ``I_q(m1, m2) = prob``.

    Upper-tail probabilities are reflected through ``I_x(a, b) = 1 - I_{1-x}(b, a)``
    so that ``1 - prob`` is resolved at full relative precision.
    """
    if not 0.0 < prob < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {prob}")
    a, b = params.m1, params.m2
    if prob <= 0.5:
        return _quantile_lower(prob, a, b)
    return 1.0 - _quantile_lower(1.0 - prob, b, a)
