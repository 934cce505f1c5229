"""Immutable simple graphs in compressed adjacency form, plus planted instances."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .model import RsbmParams

__all__ = ["Graph", "PlantedInstance", "as_labels"]


class Graph:
    """Undirected simple graph on ``num_vertices`` vertices.

    Neighbour lists are stored CSR-style (``indptr``, ``indices``) and kept
    sorted. Instances are immutable: the arrays are flagged read-only, so a
    graph can be shared freely between threads.
    """

    is_multigraph = False

    def __init__(self, num_vertices, indptr, indices):
        self.num_vertices = int(num_vertices)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self._rows = None
        self._table = None

    @classmethod
    def from_edges(cls, num_vertices, edges):
        """Build a graph from an iterable or ``(m, 2)`` array of vertex pairs.

        Raises ``ValidationError`` on self-loops, repeated edges, or
        out-of-range vertices.
        """
        num_vertices = int(num_vertices)
        if num_vertices < 1:
            raise ValidationError("graph needs at least one vertex")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= num_vertices):
            raise ValidationError(f"edge endpoint out of range [0, {num_vertices})")
        if np.any(e[:, 0] == e[:, 1]):
            v = int(e[e[:, 0] == e[:, 1]][0, 0])
            raise ValidationError(f"simplicity violated: self-loop at vertex {v}")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        codes = lo * num_vertices + hi
        if np.unique(codes).size != codes.size:
            raise ValidationError("simplicity violated: repeated edge")
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(num_vertices + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=num_vertices), out=indptr[1:])
        return cls(num_vertices, indptr, dst)

    @classmethod
    def from_dense(cls, adjacency):
        a = np.asarray(adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError("adjacency matrix must be square")
        if not np.array_equal(a, a.T):
            raise ValidationError("symmetry violated: adjacency matrix is not symmetric")
        if np.any(np.diag(a) != 0) or not np.all((a == 0) | (a == 1)):
            raise ValidationError("simplicity violated: adjacency must be 0/1 with zero diagonal")
        u, v = np.nonzero(np.triu(a, 1))
        return cls.from_edges(a.shape[0], np.column_stack([u, v]))

    @property
    def degrees(self):
        return np.diff(self.indptr)

    @property
    def num_edges(self):
        return int(self.indices.size // 2)

    @property
    def adjacency(self):
        """Per-vertex sorted neighbour arrays."""
        return [self.indices[self.indptr[i] : self.indptr[i + 1]] for i in range(self.num_vertices)]

    def neighbors(self, v):
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    @property
    def rows(self):
        """Row index of every entry of ``indices`` (the CSR expansion)."""
        if self._rows is None:
            rows = np.repeat(np.arange(self.num_vertices), self.degrees)
            rows.setflags(write=False)
            self._rows = rows
        return self._rows

    def neighbor_table(self):
        """``(num_vertices, max_degree)`` neighbour array padded with -1."""
        if self._table is None:
            deg = self.degrees
            width = int(deg.max()) if deg.size else 0
            table = np.full((self.num_vertices, width), -1, dtype=np.int64)
            offsets = np.arange(self.indices.size) - np.repeat(self.indptr[:-1], deg)
            table[self.rows, offsets] = self.indices
            table.setflags(write=False)
            self._table = table
        return self._table

    def edges(self):
        """``(m, 2)`` array of edges with ``u < v``, sorted lexicographically."""
        mask = self.rows < self.indices
        return np.column_stack([self.rows[mask], self.indices[mask]])

    def to_dense(self, dtype=np.int64):
        a = np.zeros((self.num_vertices, self.num_vertices), dtype=dtype)
        a[self.rows, self.indices] = 1
        return a

    def is_regular(self, d=None):
        deg = self.degrees
        if deg.size == 0:
            return True
        target = deg[0] if d is None else d
        return bool(np.all(deg == target))

    def fingerprint(self):
        """SHA-256 of the canonical edge list; equal graphs share a fingerprint."""
        h = hashlib.sha256()
        h.update(str(self.num_vertices).encode())
        h.update(np.ascontiguousarray(self.edges(), dtype="<i8").tobytes())
        return h.hexdigest()

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):
        return hash(self.fingerprint())

    def __repr__(self):
        return f"Graph(num_vertices={self.num_vertices}, num_edges={self.num_edges})"


def as_labels(labels, num_vertices=None):
    """Validate a +-1 labelling and return it as an ``int8`` array."""
    s = np.asarray(labels)
    if s.ndim != 1:
        raise ValidationError("labels must be a one-dimensional sequence")
    if num_vertices is not None and s.shape[0] != num_vertices:
        raise ValidationError(
            f"length mismatch: {s.shape[0]} labels for {num_vertices} vertices"
        )
    if not np.all((s == 1) | (s == -1)):
        raise ValidationError("labels must be exactly +1 or -1")
    return s.astype(np.int8)


@dataclass(frozen=True)
class PlantedInstance:
    """A sampled RSBM graph together with its hidden partition.

    ``labels[v]`` is +1 for the community that was built on vertices
    ``0..n-1`` before relabelling and -1 for the other one. ``relabeling``
    maps construction indices to output vertex ids.
    """

    graph: Graph
    labels: np.ndarray
    params: RsbmParams
    seed: int
    sampler: str
    relabeling: np.ndarray = field(repr=False, default=None)

    @property
    def sigma(self):
        return self.labels.astype(np.float64)
