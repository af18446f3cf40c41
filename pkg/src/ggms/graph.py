"""Graphs, per-edge losses and error accounting.

An :class:`AdjacencyGraph` plays three roles: the true conditional
independence graph, a hypothesis about it, and the decision matrix a
selection procedure returns.

Two pair-counting conventions coexist on purpose:

* :func:`count_errors` counts **unordered** pairs, so every wrong edge is
  one error.
* :func:`loss` sums over **ordered** pairs ``i != j`` (the double sum over
  rows and columns), so every wrong edge contributes its loss twice.

For scalar losses the two are linked by
``loss(S, Q) == 2 * (a * type_one + b * type_two)``.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple

import numpy as np


class AdjacencyGraph:
    """Simple undirected graph on ``p`` vertices stored as a dense boolean matrix.

    Vertices are 0-based in the Python API and 1-based in the edge-list text
    format. Instances are immutable: the underlying array is read-only.
    """

    __slots__ = ("_edges",)

    def __init__(self, edges):
        g = np.array(edges, dtype=bool)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 1:
            raise ValueError(f"adjacency matrix must be square and non-empty, got shape {g.shape}")
        if not np.array_equal(g, g.T):
            raise ValueError("adjacency matrix must be symmetric")
        if g.diagonal().any():
            raise ValueError("adjacency matrix must have a zero diagonal")
        g.setflags(write=False)
        self._edges = g

    @classmethod
    def empty(cls, p: int) -> "AdjacencyGraph":
        return cls(np.zeros((p, p), dtype=bool))

    @classmethod
    def complete(cls, p: int) -> "AdjacencyGraph":
        return cls(~np.eye(p, dtype=bool))

    @classmethod
    def from_edges(cls, p: int, pairs: Iterable[tuple[int, int]]) -> "AdjacencyGraph":
        """Build a graph from 0-based vertex pairs."""
        g = np.zeros((p, p), dtype=bool)
        for i, j in pairs:
            if not (0 <= i < p and 0 <= j < p):
                raise ValueError(f"edge ({i}, {j}) out of range for p={p}")
            if i == j:
                raise ValueError(f"self loop at vertex {i}")
            g[i, j] = g[j, i] = True
        return cls(g)

    @property
    def edges(self) -> np.ndarray:
        return self._edges

    @property
    def p(self) -> int:
        return self._edges.shape[0]

    @property
    def n_edges(self) -> int:
        return int(np.triu(self._edges, 1).sum())

    @property
    def n_pairs(self) -> int:
        return self.p * (self.p - 1) // 2

    def edge_list(self) -> list[tuple[int, int]]:
        """Sorted 0-based pairs ``(i, j)`` with ``i < j``."""
        i, j = np.nonzero(np.triu(self._edges, 1))
        return [(int(a), int(b)) for a, b in zip(i, j)]

    def permute(self, perm) -> "AdjacencyGraph":
        """Relabel vertices so that new vertex ``k`` is old vertex ``perm[k]``."""
        perm = np.asarray(perm)
        return AdjacencyGraph(self._edges[np.ix_(perm, perm)])

    def __eq__(self, other):
        if not isinstance(other, AdjacencyGraph):
            return NotImplemented
        return np.array_equal(self._edges, other._edges)

    def __hash__(self):
        return hash((self.p, self._edges.tobytes()))

    def __repr__(self):
        return f"AdjacencyGraph(p={self.p}, edges={self.edge_list()})"

    # -- text formats -----------------------------------------------------

    def to_edgelist(self, comments: Iterable[str] = ()) -> str:
        """Edge-list text: optional ``#`` comments, ``p=<int>``, then ``i j`` (1-based)."""
        lines = [f"# {c}" for c in comments]
        lines.append(f"p={self.p}")
        lines.extend(f"{i + 1} {j + 1}" for i, j in self.edge_list())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str) -> "AdjacencyGraph":
        p = None
        pairs = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if p is None:
                if not line.startswith("p="):
                    raise ValueError(f"line {lineno}: expected header 'p=<int>', got {line!r}")
                p = int(line[2:])
                if p < 1:
                    raise ValueError(f"line {lineno}: p must be positive")
                continue
            fields = line.split()
            if len(fields) != 2:
                raise ValueError(f"line {lineno}: expected 'i j', got {line!r}")
            i, j = int(fields[0]), int(fields[1])
            pairs.append((i - 1, j - 1))
        if p is None:
            raise ValueError("missing 'p=<int>' header")
        return cls.from_edges(p, pairs)

    def to_dot(self, comments: Iterable[str] = ()) -> str:
        """Undirected DOT graph; vertices are labelled 1..p."""
        lines = [f"// {c}" for c in comments]
        lines.append("graph G {")
        lines.extend(f"  {k};" for k in range(1, self.p + 1))
        lines.extend(f"  {i + 1} -- {j + 1};" for i, j in self.edge_list())
        lines.append("}")
        return "\n".join(lines) + "\n"


def _pair_matrix(value, p: int, name: str) -> np.ndarray:
    m = np.array(value, dtype=float)
    if m.ndim == 0:
        m = np.full((p, p), float(m))
    if m.shape != (p, p):
        raise ValueError(f"{name} must be a scalar or a {p}x{p} matrix, got shape {m.shape}")
    if not np.array_equal(m, m.T):
        raise ValueError(f"{name} must be symmetric")
    off = ~np.eye(p, dtype=bool)
    if not np.all(np.isfinite(m[off])) or np.any(m[off] <= 0):
        raise ValueError(f"{name} must be finite and positive off the diagonal")
    np.fill_diagonal(m, 0.0)
    m.setflags(write=False)
    return m


class LossSpec:
    """Per-edge losses: ``a[i, j]`` for a false inclusion, ``b[i, j]`` for a false exclusion.

    Either build it from full matrices, or use :meth:`scalar` when every edge
    carries the same pair of losses. Scalar specs also accept ``p=None`` and
    then broadcast to whatever graph size they are used with.
    """

    __slots__ = ("_a", "_b", "_scalar")

    def __init__(self, a, b, p: int | None = None):
        if np.ndim(a) == 0 and np.ndim(b) == 0:
            a, b = float(a), float(b)
            for name, v in (("a", a), ("b", b)):
                if not (math.isfinite(v) and v > 0):
                    raise ValueError(f"loss {name} must be finite and positive, got {v}")
            self._scalar = (a, b)
            self._a = self._b = None
            if p is not None:
                self._a = _pair_matrix(a, p, "a")
                self._b = _pair_matrix(b, p, "b")
            return
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        p = a.shape[0] if a.ndim == 2 else b.shape[0]
        self._a = _pair_matrix(a, p, "a")
        self._b = _pair_matrix(b, p, "b")
        off = ~np.eye(p, dtype=bool)
        av, bv = np.unique(self._a[off]), np.unique(self._b[off])
        self._scalar = (float(av[0]), float(bv[0])) if len(av) == 1 and len(bv) == 1 else None

    @classmethod
    def scalar(cls, a: float, b: float) -> "LossSpec":
        return cls(a, b)

    @classmethod
    def from_alpha(cls, alpha: float) -> "LossSpec":
        """Losses ``a = 1 - alpha`` and ``b = alpha``; every edge test then runs at level ``alpha``."""
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        return cls(1.0 - alpha, alpha)

    @property
    def scalar_values(self) -> tuple[float, float] | None:
        """``(a, b)`` when all edges share the same losses, else ``None``."""
        return self._scalar

    @property
    def p(self) -> int | None:
        return None if self._a is None else self._a.shape[0]

    def matrices(self, p: int) -> tuple[np.ndarray, np.ndarray]:
        """Loss matrices ``(a, b)`` for a graph on ``p`` vertices."""
        if self._a is None:
            return _pair_matrix(self._scalar[0], p, "a"), _pair_matrix(self._scalar[1], p, "b")
        if self._a.shape[0] != p:
            raise ValueError(f"loss matrices are {self._a.shape[0]}x{self._a.shape[0]}, graph has p={p}")
        return self._a, self._b

    def alpha_matrix(self, p: int) -> np.ndarray:
        """Per-edge significance levels ``b / (a + b)``; zero on the diagonal."""
        a, b = self.matrices(p)
        out = np.zeros((p, p))
        off = ~np.eye(p, dtype=bool)
        out[off] = b[off] / (a[off] + b[off])
        return out

    def __repr__(self):
        if self._scalar is not None:
            return f"LossSpec(a={self._scalar[0]!r}, b={self._scalar[1]!r})"
        return f"LossSpec(p={self.p}, a=<matrix>, b=<matrix>)"


class ErrorCount(NamedTuple):
    """Numbers of false inclusions (``type_one``) and false exclusions (``type_two``)."""

    type_one: int
    type_two: int


def alpha_from_losses(a: float, b: float) -> float:
    """Significance level ``b / (a + b)`` that makes an edge test risk-optimal."""
    if not (a > 0 and b > 0):
        raise ValueError(f"losses must be positive, got a={a}, b={b}")
    return b / (a + b)


def _check_pair(truth: AdjacencyGraph, selected: AdjacencyGraph):
    if truth.p != selected.p:
        raise ValueError(f"dimension mismatch: truth has p={truth.p}, selected has p={selected.p}")


def count_errors(truth: AdjacencyGraph, selected: AdjacencyGraph) -> ErrorCount:
    _check_pair(truth, selected)
    s = np.triu(truth.edges, 1)
    q = np.triu(selected.edges, 1)
    return ErrorCount(int(np.sum(~s & q)), int(np.sum(s & ~q)))


def ordered_loss(s: np.ndarray, q: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Additive loss over ordered pairs for raw boolean matrices (no validation)."""
    false_in = ~s & q
    false_out = s & ~q
    np.fill_diagonal(false_in, False)
    np.fill_diagonal(false_out, False)
    return math.fsum(np.concatenate((a[false_in], b[false_out])).tolist())


def loss(truth: AdjacencyGraph, selected: AdjacencyGraph, losses: LossSpec) -> float:
    """Additive loss of deciding ``selected`` when ``truth`` holds.

    Sums ``a[i, j]`` over false inclusions and ``b[i, j]`` over false
    exclusions across all **ordered** pairs ``i != j``, so each misclassified
    edge is charged twice. The sum is computed with :func:`math.fsum` and is
    therefore the correctly rounded value of the exact sum.
    """
    _check_pair(truth, selected)
    a, b = losses.matrices(truth.p)
    return ordered_loss(truth.edges, selected.edges, a, b)
