"""Graph selection procedures built from per-edge tests.

Every procedure here works on the matrix of sample partial correlations, so
the only thing that differs between them is the rule that turns ``r_ij``
into an edge decision. A procedure is used in two ways:

* ``procedure.select(x)`` analyses a single sample and returns a graph;
* ``procedure.decide(partials, n)`` maps a ``(m, p, p)`` stack of partial
  correlation matrices to a ``(m, p, p)`` boolean stack. The Monte Carlo
  harness uses this batched form.

The risk-optimal unbiased procedure (:class:`OptimalUnbiased`) tests edge
``(i, j)`` at level ``b_ij / (a_ij + b_ij)`` with the exact beta threshold.
The Fisher z procedures are asymptotic baselines for comparison.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .covariance import SampleMatrix, partial_correlations, sample_covariance
from .edgetest import make_config
from .graph import AdjacencyGraph, LossSpec

CORRECTIONS = ("none", "bonferroni", "holm")


@dataclass(frozen=True)
class SelectionResult:
    """A selected graph together with the quantities that produced it."""

    graph: AdjacencyGraph
    n: int
    partials: np.ndarray
    alpha_matrix: np.ndarray
    thresholds: np.ndarray
    procedure: dict

    @property
    def p(self) -> int:
        return self.graph.p

    def provenance(self) -> list[str]:
        return [f"{k}={_fmt(v)}" for k, v in self.procedure.items()] + [f"n={self.n}", f"p={self.p}"]

    def to_edgelist(self, extra=()) -> str:
        return self.graph.to_edgelist(list(extra) + self.provenance())

    def to_dot(self, extra=()) -> str:
        return self.graph.to_dot(list(extra) + self.provenance())

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "procedure": self.procedure,
            "edges": [[i + 1, j + 1] for i, j in self.graph.edge_list()],
            "alpha_matrix": self.alpha_matrix.tolist(),
            "thresholds": self.thresholds.tolist(),
        }

    def to_json(self, extra: dict | None = None) -> str:
        d = self.to_dict()
        if extra:
            d = {**extra, **d}
        return json.dumps(d, indent=2) + "\n"


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _upper_to_graph(upper: np.ndarray) -> np.ndarray:
    """Mirror the strict upper triangle of each matrix in a stack."""
    p = upper.shape[-1]
    mask = np.triu(np.ones((p, p), dtype=bool), 1)
    up = upper & mask
    return up | np.swapaxes(up, -1, -2)


class Procedure:
    """Base class: subclasses implement :meth:`decide` and :meth:`describe`."""

    name = "procedure"

    def describe(self) -> dict:
        return {"procedure": self.name}

    def decide(self, partials: np.ndarray, n: int) -> np.ndarray:
        raise NotImplementedError

    def thresholds(self, n: int, p: int) -> np.ndarray:
        """Per-pair thresholds on ``|r_ij|`` (NaN where not meaningful)."""
        return np.full((p, p), np.nan)

    def alpha_matrix(self, p: int) -> np.ndarray:
        return np.zeros((p, p))

    def fit(self, x: SampleMatrix) -> SelectionResult:
        r = partial_correlations(sample_covariance(x)).values
        g = self.decide(r[None], x.n)[0]
        return SelectionResult(
            graph=AdjacencyGraph(g),
            n=x.n,
            partials=r,
            alpha_matrix=self.alpha_matrix(x.p),
            thresholds=self.thresholds(x.n, x.p),
            procedure=self.describe(),
        )

    def select(self, x: SampleMatrix) -> AdjacencyGraph:
        return self.fit(x).graph

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.describe().items() if k != "procedure")
        return f"{type(self).__name__}({args})"


class OptimalUnbiased(Procedure):
    """Exact per-edge partial correlation tests at levels ``b_ij / (a_ij + b_ij)``.

    With additive losses this minimizes risk among unbiased multiple
    decision procedures. ``OptimalUnbiased.with_alpha(alpha)`` is the
    uniform case ``a = 1 - alpha``, ``b = alpha``.
    """

    name = "ou"

    def __init__(self, losses: LossSpec):
        self.losses = losses

    @classmethod
    def with_alpha(cls, alpha: float) -> "OptimalUnbiased":
        return cls(LossSpec.from_alpha(alpha))

    def describe(self) -> dict:
        d = {"procedure": self.name}
        sv = self.losses.scalar_values
        if sv is not None:
            d.update(loss_a=sv[0], loss_b=sv[1], alpha=sv[1] / (sv[0] + sv[1]))
        return d

    def alpha_matrix(self, p: int) -> np.ndarray:
        return self.losses.alpha_matrix(p)

    def thresholds(self, n: int, p: int) -> np.ndarray:
        alphas = self.alpha_matrix(p)
        t = np.zeros((p, p))
        iu = np.triu_indices(p, 1)
        cache = {}
        for i, j in zip(*iu):
            a = float(alphas[i, j])
            if a not in cache:
                cache[a] = make_config(n, p, a).threshold
            t[i, j] = t[j, i] = cache[a]
        return t

    def decide(self, partials: np.ndarray, n: int) -> np.ndarray:
        partials = np.asarray(partials)
        t = self.thresholds(n, partials.shape[-1])
        return _upper_to_graph(np.abs(partials) >= t)


class FisherZ(Procedure):
    """Asymptotic baseline: ``sqrt(n - p - 1) * |atanh(r_ij)|`` against normal quantiles.

    ``correction`` is ``"none"`` (every pair at level ``alpha``),
    ``"bonferroni"`` (level ``alpha / M``) or ``"holm"`` (step-down over the
    ``M = p (p - 1) / 2`` pairs).
    """

    def __init__(self, alpha: float, correction: str = "none"):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        if correction not in CORRECTIONS:
            raise ValueError(f"unknown correction {correction!r}; expected one of {CORRECTIONS}")
        self.alpha = float(alpha)
        self.correction = correction

    @property
    def name(self) -> str:
        return "fisher-z" if self.correction == "none" else f"fisher-z-{self.correction}"

    def describe(self) -> dict:
        return {"procedure": self.name, "alpha": self.alpha, "correction": self.correction}

    def alpha_matrix(self, p: int) -> np.ndarray:
        m = p * (p - 1) // 2
        level = self.alpha / m if self.correction == "bonferroni" else self.alpha
        return np.where(np.eye(p, dtype=bool), 0.0, level)

    @staticmethod
    def _critical(level: float) -> float:
        return -NormalDist().inv_cdf(level / 2.0)

    def thresholds(self, n: int, p: int) -> np.ndarray:
        if self.correction == "holm":
            return super().thresholds(n, p)
        level = self.alpha_matrix(p)[0, 1] if p > 1 else self.alpha
        t = math.tanh(self._critical(level) / math.sqrt(n - p - 1))
        return np.where(np.eye(p, dtype=bool), np.nan, t)

    def decide(self, partials: np.ndarray, n: int) -> np.ndarray:
        partials = np.asarray(partials, dtype=float)
        m_stack, p, _ = partials.shape
        if n - p - 1 <= 0:
            raise ValueError(f"Fisher z test needs n > p + 1, got n={n}, p={p}")
        iu = np.triu_indices(p, 1)
        r = partials[:, iu[0], iu[1]]
        if np.any(np.abs(r) >= 1.0):
            raise ValueError("Fisher z transform undefined for |r| = 1")
        stat = math.sqrt(n - p - 1) * np.abs(np.arctanh(r))
        n_pairs = r.shape[1]
        if self.correction == "none":
            rej = stat > self._critical(self.alpha)
        elif self.correction == "bonferroni":
            rej = stat > self._critical(self.alpha / n_pairs)
        else:
            # step-down: k-th largest statistic against level alpha / (M - k)
            crit = np.array([self._critical(self.alpha / (n_pairs - k)) for k in range(n_pairs)])
            order = np.argsort(-stat, axis=1, kind="stable")
            passed = np.take_along_axis(stat, order, axis=1) > crit
            n_rej = np.where(passed.all(axis=1), n_pairs, np.argmin(passed, axis=1))
            rej_sorted = np.arange(n_pairs) < n_rej[:, None]
            rej = np.zeros_like(rej_sorted)
            np.put_along_axis(rej, order, rej_sorted, axis=1)
        out = np.zeros((m_stack, p, p), dtype=bool)
        out[:, iu[0], iu[1]] = rej
        return out | np.swapaxes(out, 1, 2)


def select_ou(x: SampleMatrix, losses: LossSpec) -> AdjacencyGraph:
    """Risk-optimal unbiased graph selection for the given per-edge losses."""
    return OptimalUnbiased(losses).select(x)


def select_with_alpha(x: SampleMatrix, alpha: float) -> AdjacencyGraph:
    """:func:`select_ou` with losses ``(1 - alpha, alpha)``: every edge tested at level ``alpha``."""
    return select_ou(x, LossSpec.from_alpha(alpha))


def select_fisher_z(x: SampleMatrix, alpha: float, correction: str = "none") -> AdjacencyGraph:
    return FisherZ(alpha, correction).select(x)


def make_procedure(name: str, losses: LossSpec) -> Procedure:
    """Look up a procedure by its command-line name.

    Known names: ``ou``, ``fisher-z``, ``fisher-z-bonferroni``,
    ``fisher-z-holm``. The Fisher z baselines use the level implied by
    scalar ``losses``.
    """
    if name == "ou":
        return OptimalUnbiased(losses)
    if name.startswith("fisher-z"):
        correction = name[len("fisher-z-"):] if name != "fisher-z" else "none"
        sv = losses.scalar_values
        if sv is None:
            raise ValueError("Fisher z baselines need scalar losses")
        return FisherZ(sv[1] / (sv[0] + sv[1]), correction)
    raise KeyError(name)


__all__ = [
    "CORRECTIONS",
    "FisherZ",
    "OptimalUnbiased",
    "Procedure",
    "SelectionResult",
    "make_procedure",
    "select_fisher_z",
    "select_ou",
    "select_with_alpha",
]
