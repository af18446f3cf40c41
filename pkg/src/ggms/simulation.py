"""Ground-truth models, Gaussian sampling and Monte Carlo risk estimation.

Replication ``k`` of a run with seed ``s`` draws its sample from its own
Philox stream keyed by ``(s, k)``, so results do not depend on how
replications are split between worker threads. All tallies are integers or
are summed with :func:`math.fsum`, which makes every report bit-identical
for a given ``(model, procedure, n, replications, losses, seed)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .covariance import SampleMatrix, batch_covariance, batch_partial_correlations
from .graph import AdjacencyGraph, LossSpec, ordered_loss
from .selection import Procedure

STRUCTURES = ("empty", "chain", "star", "cycle", "random")

#: Diagonal dominance margin kept by :func:`generate_model`.
DOMINANCE_MARGIN = 0.05

#: Largest tolerated fraction of replications with a singular sample covariance.
MAX_FAILURE_RATE = 1e-3

_CHUNK = 512


class ReplicationFailureError(RuntimeError):
    """Too many replications produced a singular sample covariance."""


def stream_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for stream ``stream`` of ``seed`` (both in ``[0, 2**64)``)."""
    if not (0 <= seed < 2**64 and 0 <= stream < 2**64):
        raise ValueError(f"seed and stream must lie in [0, 2**64), got {seed}, {stream}")
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(stream)))


@dataclass(frozen=True)
class GroundTruthModel:
    """Gaussian model given by its precision matrix; its zero pattern is the true graph."""

    precision: np.ndarray
    mean: np.ndarray
    graph: AdjacencyGraph
    covariance: np.ndarray
    cholesky: np.ndarray
    descriptor: dict = field(default_factory=dict)

    @classmethod
    def from_precision(cls, precision, mean=None, descriptor=None) -> "GroundTruthModel":
        omega = np.array(precision, dtype=float)
        p = omega.shape[0]
        if omega.shape != (p, p) or not np.array_equal(omega, omega.T):
            raise ValueError("precision must be a symmetric square matrix")
        try:
            np.linalg.cholesky(omega)
        except np.linalg.LinAlgError:
            raise ValueError("precision matrix is not positive definite") from None
        mu = np.zeros(p) if mean is None else np.array(mean, dtype=float)
        if mu.shape != (p,):
            raise ValueError(f"mean must have length {p}")
        g = omega != 0
        np.fill_diagonal(g, False)
        sigma = np.linalg.inv(omega)
        sigma = (sigma + sigma.T) / 2
        chol = np.linalg.cholesky(sigma)
        for arr in (omega, mu, sigma, chol):
            arr.setflags(write=False)
        return cls(omega, mu, AdjacencyGraph(g), sigma, chol, dict(descriptor or {}))

    @property
    def p(self) -> int:
        return self.precision.shape[0]

    @property
    def partial_correlations(self) -> np.ndarray:
        """Population partial correlations ``-w_ij / sqrt(w_ii w_jj)``; unit diagonal."""
        d = np.sqrt(np.diag(self.precision))
        rho = -self.precision / np.outer(d, d)
        np.fill_diagonal(rho, 1.0)
        return rho

    def describe(self) -> dict:
        rho = self.partial_correlations
        return {
            **self.descriptor,
            "p": self.p,
            "edges": [[i + 1, j + 1] for i, j in self.graph.edge_list()],
            "edge_partial_correlations": [float(rho[i, j]) for i, j in self.graph.edge_list()],
        }


def _pattern(p: int, structure: str, density: float | None, seed: int | None) -> np.ndarray:
    g = np.zeros((p, p), dtype=bool)
    if structure == "empty":
        pass
    elif structure == "chain":
        for i in range(p - 1):
            g[i, i + 1] = True
    elif structure == "star":
        g[0, 1:] = True
    elif structure == "cycle":
        for i in range(p - 1):
            g[i, i + 1] = True
        if p > 2:
            g[0, p - 1] = True
    elif structure == "random":
        if density is None or not 0.0 <= density <= 1.0:
            raise ValueError(f"random structure needs a density in [0, 1], got {density}")
        iu = np.triu_indices(p, 1)
        draws = stream_generator(0 if seed is None else seed, 0).random(len(iu[0]))
        g[iu] = draws < density
    else:
        raise ValueError(f"unknown structure {structure!r}; expected one of {STRUCTURES}")
    return g | g.T


def generate_model(
    p: int,
    structure: str,
    strength: float = 0.3,
    seed: int | None = None,
    density: float | None = None,
) -> GroundTruthModel:
    """Unit-diagonal precision with ``-strength`` on the edges of a named pattern.

    Off-diagonals are shrunk by the largest factor ``<= 1`` that keeps every
    row diagonally dominant with margin 0.05, which makes the matrix positive
    definite while leaving non-edges exactly zero. ``random`` draws each pair
    independently with probability ``density`` from ``seed``.
    """
    if p < 2:
        raise ValueError(f"need p >= 2, got {p}")
    if not (math.isfinite(strength) and strength != 0):
        raise ValueError(f"strength must be finite and nonzero, got {strength}")
    g = _pattern(p, structure, density, seed)
    row = g.sum(axis=1).max() * abs(strength)
    scale = 1.0 if row == 0 else min(1.0, (1.0 - DOMINANCE_MARGIN) / row)
    omega = np.where(g, -strength * scale, 0.0)
    np.fill_diagonal(omega, 1.0)
    off_row = np.abs(omega).sum(axis=1) - 1.0
    assert np.all(1.0 - off_row >= DOMINANCE_MARGIN - 1e-12), "rescaled precision not dominant"
    descriptor = {"structure": structure, "strength": float(strength), "scale": float(scale)}
    if structure == "random":
        descriptor.update(density=float(density), seed=0 if seed is None else int(seed))
    return GroundTruthModel.from_precision(omega, descriptor=descriptor)


def sample_gaussian(model: GroundTruthModel, n: int, seed: int, stream: int = 0) -> SampleMatrix:
    """``n`` observations ``mean + L z`` with ``z`` from stream ``(seed, stream)``."""
    if n <= model.p:
        raise ValueError(f"need n > p, got n={n}, p={model.p}")
    z = stream_generator(seed, stream).standard_normal((model.p, n))
    return SampleMatrix(model.mean[:, None] + model.cholesky @ z)


@dataclass
class RiskReport:
    """Monte Carlo estimates of error counts and risk for one procedure.

    ``risk_unordered`` charges each misclassified edge once
    (``a * mean_type_one + b * mean_type_two`` for scalar losses);
    ``risk_ordered`` is the average of the additive loss summed over ordered
    pairs, so it is twice ``risk_unordered``.
    """

    procedure: dict
    model: dict
    n: int
    replications: int
    failed_replications: int
    seed: int
    losses: dict
    mean_type_one: float
    mean_type_two: float
    se_type_one: float
    se_type_two: float
    risk_unordered: float
    risk_ordered: float
    se_risk: float
    per_edge_rejection_rate: list
    per_edge_risk: list
    paired: dict | None = None
    version: str = __version__

    def to_dict(self) -> dict:
        return _finite_or_none(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _finite_or_none(obj):
    # JSON has no NaN; undefined standard errors (a single replication) become null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite_or_none(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite_or_none(v) for v in obj]
    return obj


@dataclass
class _Tally:
    type_one: np.ndarray
    type_two: np.ndarray
    ordered_loss: np.ndarray
    edge_counts: np.ndarray


def _se(values: np.ndarray) -> float:
    if len(values) < 2:
        return float("nan")
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def _check_identity(loss_value: float, a: float, b: float, y1: int, y2: int) -> None:
    # fsum is correctly rounded, so the additive loss must equal the exact 2(a Y_I + b Y_II) rounded once
    exact = 2 * (Fraction(a) * y1 + Fraction(b) * y2)
    if loss_value != float(exact):
        raise RuntimeError(f"loss identity violated: {loss_value!r} != {float(exact)!r}")


def _run_chunk(model, procedures, n, seed, start, stop, a_mat, b_mat, scalar):
    xs = np.stack([sample_gaussian(model, n, seed, k).values for k in range(start, stop)])
    r, ok = batch_partial_correlations(batch_covariance(xs))
    r = r[ok]
    s = model.graph.edges
    upper = np.triu(np.ones_like(s), 1)
    tallies = []
    for proc in procedures:
        dec = np.asarray(proc.decide(r, n), dtype=bool)
        y1 = np.sum(~s & dec & upper, axis=(1, 2))
        y2 = np.sum(s & ~dec & upper, axis=(1, 2))
        losses = np.array([ordered_loss(s, d, a_mat, b_mat) for d in dec])
        if scalar is not None:
            for lv, e1, e2 in zip(losses, y1.tolist(), y2.tolist()):
                _check_identity(float(lv), scalar[0], scalar[1], e1, e2)
        tallies.append(_Tally(y1, y2, losses, dec.sum(axis=0)))
    return int(np.sum(~ok)), tallies


def _simulate(model, procedures, n, replications, losses, seed, threads):
    if replications < 1:
        raise ValueError(f"need at least one replication, got {replications}")
    if n <= model.p:
        raise ValueError(f"need n > p, got n={n}, p={model.p}")
    a_mat, b_mat = losses.matrices(model.p)
    scalar = losses.scalar_values
    bounds = [(k, min(k + _CHUNK, replications)) for k in range(0, replications, _CHUNK)]

    def work(bound):
        return _run_chunk(model, procedures, n, seed, bound[0], bound[1], a_mat, b_mat, scalar)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    failed = sum(f for f, _ in parts)
    if failed > MAX_FAILURE_RATE * replications:
        raise ReplicationFailureError(
            f"{failed} of {replications} replications had a singular sample covariance"
        )
    merged = []
    for i in range(len(procedures)):
        chunks = [t[i] for _, t in parts]
        merged.append(
            _Tally(
                np.concatenate([c.type_one for c in chunks]),
                np.concatenate([c.type_two for c in chunks]),
                np.concatenate([c.ordered_loss for c in chunks]),
                sum(c.edge_counts for c in chunks),
            )
        )
    return failed, merged


def _report(model, proc, n, replications, failed, losses, seed, tally: _Tally) -> RiskReport:
    valid = replications - failed
    s = model.graph.edges
    a_mat, b_mat = losses.matrices(model.p)
    rate = tally.edge_counts / valid
    upper = np.triu(np.ones_like(s), 1)
    edge_risk = np.where(s, b_mat * (1.0 - rate), a_mat * rate)
    edge_risk = np.where(upper | upper.T, edge_risk, 0.0)
    mean1 = int(tally.type_one.sum()) / valid
    mean2 = int(tally.type_two.sum()) / valid
    scalar = losses.scalar_values
    if scalar is not None:
        risk = scalar[0] * mean1 + scalar[1] * mean2
        loss_desc = {"a": scalar[0], "b": scalar[1]}
    else:
        risk = math.fsum(edge_risk[upper].tolist())
        loss_desc = {"a": a_mat.tolist(), "b": b_mat.tolist()}
    return RiskReport(
        procedure=proc.describe(),
        model=model.describe(),
        n=n,
        replications=replications,
        failed_replications=failed,
        seed=seed,
        losses=loss_desc,
        mean_type_one=mean1,
        mean_type_two=mean2,
        se_type_one=_se(tally.type_one),
        se_type_two=_se(tally.type_two),
        risk_unordered=risk,
        risk_ordered=math.fsum(tally.ordered_loss.tolist()) / valid,
        se_risk=_se(tally.ordered_loss / 2),
        per_edge_rejection_rate=rate.tolist(),
        per_edge_risk=edge_risk.tolist(),
    )


def estimate_risk(
    model: GroundTruthModel,
    procedure: Procedure,
    n: int,
    replications: int,
    losses: LossSpec,
    seed: int,
    threads: int = 1,
) -> RiskReport:
    """Monte Carlo risk of ``procedure`` on samples of size ``n`` from ``model``.

    Replications whose sample covariance is singular are counted in
    ``failed_replications`` and excluded from the averages; more than 0.1%
    of them raises :class:`ReplicationFailureError`.
    """
    return compare_procedures(model, [procedure], n, replications, losses, seed, threads)[0]


def compare_procedures(
    model: GroundTruthModel,
    procedures: list,
    n: int,
    replications: int,
    losses: LossSpec,
    seed: int,
    threads: int = 1,
) -> list[RiskReport]:
    """Run several procedures on the same simulated samples.

    Each report carries a ``paired`` entry: the mean per-replication
    difference in (unordered) loss against the first procedure and its
    standard error.
    """
    if not procedures:
        return []
    failed, tallies = _simulate(model, procedures, n, replications, losses, seed, threads)
    reports = []
    ref = tallies[0].ordered_loss / 2
    for proc, tally in zip(procedures, tallies):
        rep = _report(model, proc, n, replications, failed, losses, seed, tally)
        diff = tally.ordered_loss / 2 - ref
        rep.paired = {
            "reference": procedures[0].describe()["procedure"],
            "risk_difference": math.fsum(diff.tolist()) / len(diff),
            "se_difference": _se(diff),
        }
        reports.append(rep)
    return reports


SUMMARY_FIELDS = ("name", "E_YI", "E_YII", "risk", "se_risk")


def summary_csv(reports: list[RiskReport]) -> str:
    """One row per procedure: name, E_YI, E_YII, risk (unordered), se_risk."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_FIELDS)
    for r in reports:
        w.writerow([r.procedure["procedure"], repr(r.mean_type_one), repr(r.mean_type_two),
                    repr(r.risk_unordered), repr(r.se_risk)])
    return buf.getvalue()
