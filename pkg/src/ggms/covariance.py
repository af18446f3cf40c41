"""Sample covariance, precision matrix and partial correlations.

Every public function here has a batched twin (``batch_*``) operating on
stacks of matrices along a leading axis. The single-matrix functions are
thin wrappers over the batched kernels, so a sample analysed alone and the
same sample analysed inside a Monte Carlo batch give bit-identical numbers.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

#: A Cholesky pivot at or below this fraction of the largest diagonal entry
#: marks the covariance as singular.
PIVOT_TOLERANCE = 1e-12


class SingularCovarianceError(ValueError):
    """Covariance matrix is not (numerically) positive definite."""

    def __init__(self, pivot: int, message: str | None = None):
        self.pivot = pivot
        super().__init__(message or f"covariance matrix is singular at pivot {pivot + 1}")


class DimensionError(ValueError):
    """Sample size does not exceed the number of variables."""


class MalformedInputError(ValueError):
    """Input data could not be parsed into a rectangular numeric table."""


@dataclass(frozen=True)
class SampleMatrix:
    """Observations as a ``p x n`` array; column ``t`` is the observation ``x(t)``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError(f"sample must be a 2-d array, got {v.ndim} dimensions")
        p, n = v.shape
        if p < 1:
            raise ValueError("sample has no variables")
        if n <= p:
            raise DimensionError(f"need more observations than variables, got n={n}, p={p}")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_observations(cls, rows) -> "SampleMatrix":
        """Build from an ``n x p`` array (one observation per row)."""
        return cls(np.asarray(rows, dtype=float).T)

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric positive definite ``p x p`` matrix (validated on construction)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"covariance must be square, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("covariance contains non-finite values")
        v = (v + v.T) / 2
        _check_pivots(v)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def p(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class PartialCorrelationMatrix:
    """Partial correlations of each pair given all other variables; unit diagonal."""

    values: np.ndarray

    @property
    def p(self) -> int:
        return self.values.shape[0]


def _check_pivots(c: np.ndarray) -> None:
    """Raise :class:`SingularCovarianceError` naming the first failing Cholesky pivot."""
    scale = float(np.max(np.diag(c))) if c.size else 0.0
    if scale <= 0:
        raise SingularCovarianceError(0)
    chol, info = lapack.dpotrf(c, lower=1, clean=1)
    if info > 0:
        raise SingularCovarianceError(info - 1)
    if info < 0:
        raise ValueError(f"invalid argument {-info} to Cholesky factorization")
    bad = np.nonzero(np.diag(chol) ** 2 <= PIVOT_TOLERANCE * scale)[0]
    if bad.size:
        raise SingularCovarianceError(int(bad[0]))


def batch_covariance(x: np.ndarray) -> np.ndarray:
    """1/n-normalized centered cross products for a ``(..., p, n)`` stack."""
    x = np.asarray(x, dtype=float)
    xc = x - x.mean(axis=-1, keepdims=True)
    c = np.matmul(xc, np.swapaxes(xc, -1, -2)) / x.shape[-1]
    return (c + np.swapaxes(c, -1, -2)) / 2


def batch_precision(c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Invert a ``(m, p, p)`` stack through Cholesky factors.

    Returns ``(precision, ok)``. Matrices failing the pivot test get a NaN
    precision and ``ok[k] = False``.
    """
    c = np.asarray(c, dtype=float)
    m, p, _ = c.shape
    ok = np.ones(m, dtype=bool)
    try:
        chol = np.linalg.cholesky(c)
    except np.linalg.LinAlgError:
        chol = np.full_like(c, np.nan)
        for k in range(m):
            try:
                chol[k] = np.linalg.cholesky(c[k])
            except np.linalg.LinAlgError:
                ok[k] = False
    scale = np.max(np.diagonal(c, axis1=1, axis2=2), axis=1)
    pivots = np.diagonal(chol, axis1=1, axis2=2) ** 2
    ok &= np.all(pivots > PIVOT_TOLERANCE * scale[:, None], axis=1) & (scale > 0)
    safe = np.where(ok[:, None, None], chol, np.eye(p))
    linv = np.linalg.inv(safe)
    prec = np.matmul(np.swapaxes(linv, 1, 2), linv)
    prec = (prec + np.swapaxes(prec, 1, 2)) / 2
    prec[~ok] = np.nan
    return prec, ok


def batch_partial_correlations(c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Partial correlations ``-k_ij / sqrt(k_ii k_jj)`` for a ``(m, p, p)`` stack.

    Returns ``(partials, ok)`` where ``ok`` flags positive definite inputs.
    """
    prec, ok = batch_precision(c)
    d = np.sqrt(np.diagonal(prec, axis1=1, axis2=2))
    r = -prec / (d[:, :, None] * d[:, None, :])
    r = np.clip(r, -1.0, 1.0)
    idx = np.arange(r.shape[-1])
    r[:, idx, idx] = 1.0
    r[~ok] = np.nan
    return r, ok


def sample_covariance(x: SampleMatrix) -> CovarianceMatrix:
    """Centered cross-product matrix divided by ``n`` (not ``n - 1``).

    The divisor has no effect on partial correlations, hence none on any
    selected graph.
    """
    return CovarianceMatrix(batch_covariance(x.values[None])[0])


def precision(c: CovarianceMatrix) -> np.ndarray:
    prec, ok = batch_precision(c.values[None])
    if not ok[0]:
        _check_pivots(c.values)
        raise SingularCovarianceError(0)
    return prec[0]


def partial_correlations(c: CovarianceMatrix) -> PartialCorrelationMatrix:
    r, ok = batch_partial_correlations(c.values[None])
    if not ok[0]:
        _check_pivots(c.values)
        raise SingularCovarianceError(0)
    r = r[0]
    r.setflags(write=False)
    return PartialCorrelationMatrix(r)


def sample_partial_correlations(x: SampleMatrix) -> PartialCorrelationMatrix:
    """Sample partial correlations ``r_ij`` straight from observations."""
    return partial_correlations(sample_covariance(x))


def read_csv(source) -> SampleMatrix:
    """Read a sample from CSV: one observation per row, one variable per column.

    ``source`` is a path or an open text stream. A first row that does not
    parse as numbers is treated as a header and skipped. Raises
    :class:`MalformedInputError` for ragged rows, non-numeric or non-finite
    cells, and :class:`DimensionError` when there are not more rows than
    columns.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as fh:
            text = fh.read()
    else:
        text = source.read()
    rows = [r for r in csv.reader(io.StringIO(text)) if any(cell.strip() for cell in r)]
    if not rows:
        raise MalformedInputError("input is empty")

    def parse(row, lineno):
        try:
            return [float(cell) for cell in row]
        except ValueError:
            raise MalformedInputError(f"row {lineno}: non-numeric value") from None

    try:
        [float(cell) for cell in rows[0]]
        start = 0
    except ValueError:
        start = 1
    width = len(rows[0])
    data = []
    for lineno, row in enumerate(rows[start:], start + 1):
        if len(row) != width:
            raise MalformedInputError(f"row {lineno}: expected {width} columns, got {len(row)}")
        data.append(parse(row, lineno))
    if not data:
        raise MalformedInputError("input has a header but no observations")
    arr = np.array(data)
    if not np.all(np.isfinite(arr)):
        raise MalformedInputError("input contains non-finite values")
    return SampleMatrix.from_observations(arr)
