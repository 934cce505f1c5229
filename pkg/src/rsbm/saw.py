"""Self-avoiding-walk matrices and local tree-likeness audits.

``S^(l)[i, j]`` counts the simple paths with ``l`` edges from ``i`` to ``j``.
On a vertex whose radius-``l`` ball is a tree the row of ``S^(l)`` is fully
determined by the degrees, which is what makes these matrices useful for
recovering the planted partition.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import BudgetError, ParseError, ValidationError
from .graph import as_labels
from .spectral import DEFAULT_MAX_ITER, power_iteration, second_eigenvector

__all__ = [
    "SawMatrix",
    "TangleAudit",
    "SawSpectrum",
    "build_saw",
    "estimate_saw_cost",
    "tangle_audit",
    "saw_quadratic_forms",
    "saw_recover",
    "write_saw",
    "read_saw",
]

DEFAULT_BUDGET = 10**8
_CHUNK_PATHS = 1 << 21


@dataclass(frozen=True)
class SawMatrix:
    l: int
    counts: np.ndarray
    built_from: str

    @property
    def num_vertices(self):
        return self.counts.shape[0]


@dataclass(frozen=True)
class TangleAudit:
    """Cycle structure of every radius-``l`` ball.

    ``excess_per_vertex[v]`` is ``E - V + 1`` of the subgraph induced on
    ``B_l(v)``, i.e. its number of independent cycles.
    """

    l: int
    excess_per_vertex: np.ndarray
    ball_sizes: np.ndarray

    @property
    def tangle_free(self):
        return bool(self.excess_per_vertex.max(initial=0) <= 1)

    @property
    def X_l(self):
        return int(np.count_nonzero(self.excess_per_vertex >= 1))

    @property
    def tree_vertices(self):
        return np.flatnonzero(self.excess_per_vertex == 0)

    def histogram(self):
        values, counts = np.unique(self.excess_per_vertex, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    def to_dict(self):
        return {
            "l": self.l,
            "tangle_free": self.tangle_free,
            "X_l": self.X_l,
            "num_tree_vertices": int(self.tree_vertices.size),
            "max_excess": int(self.excess_per_vertex.max(initial=0)),
            "excess_histogram": {str(k): v for k, v in self.histogram().items()},
        }


def estimate_saw_cost(graph, l):
    """Upper bound on the number of path extensions ``build_saw`` performs."""
    deg = graph.degrees
    dmax = int(deg.max()) if deg.size else 0
    per_root = sum(dmax * max(dmax - 1, 0) ** (k - 1) for k in range(1, l + 1))
    return graph.num_vertices * per_root


def build_saw(graph, l, budget=DEFAULT_BUDGET):
    """Exact self-avoiding-walk counts of length ``l``.

    Paths are grown breadth-first, one edge at a time, for blocks of root
    vertices; an extension is kept only if its endpoint is not already on
    the path. Raises ``BudgetError`` when the estimated number of
    extensions exceeds ``budget``.
    """
    if isinstance(l, bool) or int(l) != l or l < 1:
        raise ValidationError(f"l must be a positive integer, got {l!r}")
    l = int(l)
    cost = estimate_saw_cost(graph, l)
    if cost > budget:
        raise BudgetError(f"self-avoiding walks of length {l}", cost, budget)

    n = graph.num_vertices
    table = graph.neighbor_table()
    dmax = table.shape[1]
    counts = np.zeros((n, n), dtype=np.int64)
    if dmax == 0:
        return SawMatrix(l, counts, graph.fingerprint())
    per_root = max(1, dmax * max(dmax - 1, 1) ** (l - 1))
    chunk = max(1, _CHUNK_PATHS // per_root)
    for lo in range(0, n, chunk):
        roots = np.arange(lo, min(n, lo + chunk))
        paths = roots[:, None]
        for _ in range(l):
            cand = table[paths[:, -1]]
            ok = cand >= 0
            for col in range(paths.shape[1]):
                ok &= cand != paths[:, col : col + 1]
            pi, ci = np.nonzero(ok)
            paths = np.column_stack([paths[pi], cand[pi, ci]])
            if not paths.size:
                break
        if paths.size:
            flat = paths[:, 0] * n + paths[:, -1]
            counts += np.bincount(flat, minlength=n * n).reshape(n, n)
    return SawMatrix(l, counts, graph.fingerprint())


def tangle_audit(graph, l):
    """Excess of every radius-``l`` ball (breadth-first, induced edges)."""
    if isinstance(l, bool) or int(l) != l or l < 1:
        raise ValidationError(f"l must be a positive integer, got {l!r}")
    n = graph.num_vertices
    table = graph.neighbor_table()
    excess = np.zeros(n, dtype=np.int64)
    sizes = np.zeros(n, dtype=np.int64)
    inball = np.zeros(n, dtype=bool)
    for v in range(n):
        ball = np.array([v])
        inball[v] = True
        frontier = ball
        for _ in range(l):
            nb = table[frontier].ravel()
            nb = np.unique(nb[nb >= 0])
            nb = nb[~inball[nb]]
            if not nb.size:
                break
            inball[nb] = True
            ball = np.concatenate([ball, nb])
            frontier = nb
        nb = table[ball]
        inner = np.count_nonzero(inball[nb[nb >= 0]])
        sizes[v] = ball.size
        excess[v] = inner // 2 - ball.size + 1
        inball[ball] = False
    return TangleAudit(int(l), excess, sizes)


def saw_quadratic_forms(saw, labels):
    """``(e' S e / N, sigma' S sigma / N)`` computed exactly, returned as floats."""
    counts = saw.counts
    n = counts.shape[0]
    s = as_labels(labels, n).astype(np.int64)
    ee = Fraction(int(counts.sum()), n)
    ss = Fraction(int(s @ counts @ s), n)
    return float(ee), float(ss)


@dataclass(frozen=True)
class SawSpectrum:
    lambda1: float
    lambda2: float
    v1: np.ndarray
    v2: np.ndarray
    residuals: tuple
    iterations: tuple
    l: int

    def to_dict(self):
        return {
            "l": self.l,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "residuals": list(self.residuals),
            "iterations": list(self.iterations),
        }


def saw_recover(graph, l, tolerance=None, max_iter=DEFAULT_MAX_ITER, seed=None, budget=DEFAULT_BUDGET, saw=None):
    """Top two eigenpairs of ``S^(l)``; ``v2`` carries the community signal.

    The dominant pair is found first and deflated. ``tolerance`` defaults to
    ``1e-10`` times the largest row sum, since entries of ``S^(l)`` grow
    like ``(d - 1)**l``.
    """
    if saw is None:
        saw = build_saw(graph, l, budget)
    m = saw.counts.astype(np.float64)
    if tolerance is None:
        tolerance = 1e-10 * max(1.0, float(m.sum(axis=1).max()))
    rng = np.random.default_rng(seed)
    lam1, v1, r1, it1 = power_iteration(m, (), +1, tolerance, max_iter, rng)
    second = second_eigenvector(m, tolerance, max_iter, rng, deflate=v1)
    return SawSpectrum(
        lambda1=lam1,
        lambda2=second.lambda2,
        v1=v1,
        v2=second.v2,
        residuals=(r1, second.residual),
        iterations=(it1, second.iterations),
        l=saw.l,
    )


def write_saw(path, saw):
    """Write ``saw`` as a MatrixMarket symmetric integer coordinate file."""
    counts = saw.counts
    i, j = np.nonzero(np.tril(counts))
    with open(path, "w") as fh:
        fh.write("%%MatrixMarket matrix coordinate integer symmetric\n")
        fh.write(f"% saw l={saw.l} fingerprint={saw.built_from}\n")
        fh.write(f"{counts.shape[0]} {counts.shape[1]} {i.size}\n")
        for a, b in zip(i.tolist(), j.tolist()):
            fh.write(f"{a + 1} {b + 1} {int(counts[a, b])}\n")


def read_saw(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("%%MatrixMarket matrix coordinate integer symmetric"):
        raise ParseError("not a symmetric integer MatrixMarket file", 1)
    l, fingerprint = None, ""
    k = 1
    while k < len(lines) and lines[k].startswith("%"):
        for tok in lines[k].split():
            if tok.startswith("l="):
                l = int(tok[2:])
            elif tok.startswith("fingerprint="):
                fingerprint = tok[len("fingerprint=") :]
        k += 1
    try:
        rows, cols, nnz = (int(t) for t in lines[k].split())
    except (IndexError, ValueError):
        raise ParseError("bad size line", k + 1) from None
    counts = np.zeros((rows, cols), dtype=np.int64)
    for off, line in enumerate(lines[k + 1 : k + 1 + nnz], start=k + 2):
        try:
            a, b, v = (int(t) for t in line.split())
        except ValueError:
            raise ParseError(f"bad entry {line!r}", off) from None
        counts[a - 1, b - 1] = v
        counts[b - 1, a - 1] = v
    if l is None:
        raise ParseError("missing l= in header comment", 2)
    return SawMatrix(l, counts, fingerprint)

