"""Exact two-sided test of a single partial correlation.

Under ``rho_ij = 0`` the sample partial correlation satisfies
``(r_ij + 1) / 2 ~ Beta((n - p) / 2, (n - p) / 2)`` exactly, for every finite
sample. The test accepts "no edge" when ``|r_ij| < t`` with
``t = 1 - 2 q`` and ``q`` the ``alpha / 2`` quantile of that beta law, and
rejects (includes the edge) otherwise, boundary included.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .beta import BetaParams, beta_quantile


@dataclass(frozen=True)
class EdgeTestConfig:
    n: int
    p: int
    alpha: float
    quantile: float
    threshold: float

    @property
    def acceptance_interval(self) -> tuple[float, float]:
        """Open interval ``(2q - 1, 1 - 2q)`` of partial correlations that keep the edge out."""
        return 2.0 * self.quantile - 1.0, 1.0 - 2.0 * self.quantile


def _validate(n: int, p: int, alpha: float) -> None:
    if p < 2:
        raise ValueError(f"need at least two variables, got p={p}")
    if n <= p:
        raise ValueError(f"need n > p, got n={n}, p={p}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


@lru_cache(maxsize=4096)
def _config(n: int, p: int, alpha: float) -> EdgeTestConfig:
    m = (n - p) / 2.0
    q = beta_quantile(alpha / 2.0, BetaParams(m, m))
    return EdgeTestConfig(n=n, p=p, alpha=alpha, quantile=q, threshold=1.0 - 2.0 * q)


def make_config(n: int, p: int, alpha: float) -> EdgeTestConfig:
    """Threshold for testing one partial correlation from ``n`` observations of ``p`` variables."""
    n, p, alpha = int(n), int(p), float(alpha)
    _validate(n, p, alpha)
    return _config(n, p, alpha)


def edge_test(r: float, cfg: EdgeTestConfig) -> int:
    """1 (edge present) if ``|r| >= threshold``, else 0."""
    if not abs(r) <= 1.0:
        raise ValueError(f"partial correlation must lie in [-1, 1], got {r}")
    return int(abs(r) >= cfg.threshold)
