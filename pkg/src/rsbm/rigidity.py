"""Exhaustive oracles over equipartitions and vertex subsets of small graphs.

Subsets are ``int64`` bitmasks, so graphs are limited to 30 vertices for
partition scans (``C(30, 15) / 2 ~ 7.8e7`` candidates). Candidates are
produced in vectorised blocks: vertex 0 is pinned to the first side, the
remaining bits are split into a low and a high half, and each block is the
outer product of low masks and high masks whose popcounts add up to the
required size. Per-vertex degree counts are then popcounts of
``mask & neighbour_mask``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import BudgetError, ValidationError
from .graph import Graph, PlantedInstance, as_labels
from .spectral import second_eigenvector

__all__ = [
    "PartitionCertificate",
    "BisectionCertificate",
    "MembershipResult",
    "ExpansionReport",
    "enumerate_regular_partitions",
    "min_bisection_bruteforce",
    "rsbm_membership",
    "edge_expansion_check",
    "equipartition_masks",
    "cut_size",
]

MAX_PARTITION_VERTICES = 30
MAX_EXPANSION_VERTICES = 24
_BLOCK = 1 << 20


def _neighbor_masks(graph):
    masks = np.zeros(graph.num_vertices, dtype=np.int64)
    for v in range(graph.num_vertices):
        m = 0
        for u in graph.neighbors(v).tolist():
            m |= 1 << u
        masks[v] = m
    return masks


def _popcounts(width):
    """Masks of ``width`` bits grouped by popcount."""
    all_masks = np.arange(1 << width, dtype=np.int64)
    pc = np.bitwise_count(all_masks)
    return {k: all_masks[pc == k] for k in range(width + 1)}


def _check_size(n_vertices, limit, what):
    if n_vertices % 2:
        raise ValidationError(f"{what} needs an even number of vertices, got {n_vertices}")
    if n_vertices > limit:
        cost = math.comb(n_vertices, n_vertices // 2) / 2
        raise BudgetError(f"{what} on {n_vertices} vertices (max {limit})", cost, math.comb(limit, limit // 2) / 2)


def equipartition_masks(num_vertices):
    """Yield blocks of bitmasks ``V`` with ``0 in V`` and ``|V| = N / 2``.

    Every equipartition appears exactly once (as the side holding vertex 0).
    """
    half = num_vertices // 2
    free = num_vertices - 1
    low_width = free // 2
    high_width = free - low_width
    lows = _popcounts(low_width)
    highs = _popcounts(high_width)
    need = half - 1
    for k in range(max(0, need - high_width), min(low_width, need) + 1):
        lo = (lows[k] << 1) | 1
        hi = highs[need - k] << (low_width + 1)
        step = max(1, _BLOCK // max(1, lo.size))
        for s in range(0, hi.size, step):
            yield (hi[s : s + step, None] | lo[None, :]).ravel()


def mask_to_vertices(mask, num_vertices):
    mask = int(mask)
    return [v for v in range(num_vertices) if mask >> v & 1]


def vertices_to_mask(vertices):
    m = 0
    for v in vertices:
        m |= 1 << int(v)
    return m


def _canonical_side(labels):
    labels = np.asarray(labels)
    side = labels == labels[0]
    return np.flatnonzero(side).tolist()


def cut_size(graph, side):
    """Number of edges with exactly one endpoint in ``side``."""
    inside = np.zeros(graph.num_vertices, dtype=bool)
    inside[list(side)] = True
    return int(np.count_nonzero(inside[graph.rows] != inside[graph.indices]) // 2)


@dataclass
class PartitionCertificate:
    valid_partitions: list
    checked_count: int
    planted_side: list | None = None

    @property
    def is_unique(self):
        if len(self.valid_partitions) != 1:
            return False
        return self.planted_side is None or self.valid_partitions[0] == self.planted_side

    def to_dict(self):
        return {
            "valid_partitions": self.valid_partitions,
            "is_unique": self.is_unique,
            "checked_count": self.checked_count,
            "planted_side": self.planted_side,
        }


def _unpack(target, planted):
    if isinstance(target, PlantedInstance):
        return target.graph, target.labels if planted is None else planted, target.params
    if not isinstance(target, Graph):
        raise ValidationError("expected a Graph or a PlantedInstance")
    return target, planted, None


def _scan(graph, within, cross=None, limit=MAX_PARTITION_VERTICES, what="partition scan"):
    """Masks whose two sides are ``within``-regular (and ``cross``-regular across)."""
    n2 = graph.num_vertices
    _check_size(n2, limit, what)
    nbr = _neighbor_masks(graph)
    deg = graph.degrees
    found = []
    checked = 0
    for block in equipartition_masks(n2):
        checked += block.size
        m = block
        for v in range(n2):
            inside = np.bitwise_count(m & nbr[v]).astype(np.int64)
            member = (m >> v) & 1 == 1
            same = np.where(member, inside, deg[v] - inside)
            ok = same == within
            if cross is not None:
                ok &= deg[v] - same == cross
            m = m[ok]
            if not m.size:
                break
        found.extend(int(x) for x in m)
    return sorted(found), checked


def enumerate_regular_partitions(target, d1=None, planted=None):
    """All equipartitions whose two sides both induce ``d1``-regular graphs."""
    graph, planted, params = _unpack(target, planted)
    if d1 is None:
        if params is None:
            raise ValidationError("d1 is required for a bare graph")
        d1 = params.d1
    masks, checked = _scan(graph, d1, what="regular-partition scan")
    sides = [mask_to_vertices(m, graph.num_vertices) for m in masks]
    planted_side = None
    if planted is not None:
        planted_side = _canonical_side(as_labels(planted, graph.num_vertices))
    return PartitionCertificate(sides, checked, planted_side)


@dataclass
class BisectionCertificate:
    min_cut: int
    argmin_partitions: list
    checked_count: int
    planted_cut: int | None = None
    planted_is_min: bool | None = None

    def to_dict(self):
        return {
            "min_cut": self.min_cut,
            "argmin_partitions": self.argmin_partitions,
            "checked_count": self.checked_count,
            "planted_cut": self.planted_cut,
            "planted_is_min": self.planted_is_min,
        }


def min_bisection_bruteforce(target, planted=None):
    """Exact minimum number of crossing edges over all equipartitions."""
    graph, planted, _ = _unpack(target, planted)
    n2 = graph.num_vertices
    _check_size(n2, MAX_PARTITION_VERTICES, "min-bisection")
    nbr = _neighbor_masks(graph)
    deg = graph.degrees
    best = None
    argmin = []
    checked = 0
    for block in equipartition_masks(n2):
        checked += block.size
        cut = np.zeros(block.size, dtype=np.int64)
        for v in range(n2):
            member = (block >> v) & 1 == 1
            inside = np.bitwise_count(block & nbr[v]).astype(np.int64)
            cut += np.where(member, deg[v] - inside, 0)
        low = int(cut.min())
        if best is None or low < best:
            best, argmin = low, []
        if low == best:
            argmin.extend(int(x) for x in block[cut == best])
    sides = [mask_to_vertices(m, n2) for m in sorted(argmin)]
    cert = BisectionCertificate(best, sides, checked)
    if planted is not None:
        side = _canonical_side(as_labels(planted, n2))
        cert.planted_cut = cut_size(graph, side)
        cert.planted_is_min = cert.planted_cut == best
    return cert


@dataclass
class MembershipResult:
    member: bool
    witness: list | None
    checked_count: int

    def __bool__(self):
        return self.member

    def to_dict(self):
        return {"member": self.member, "witness": self.witness, "checked_count": self.checked_count}


def rsbm_membership(graph, d1, d2):
    """Whether some equipartition makes ``graph`` an RSBM graph with degrees ``(d1, d2)``.

    The witness is the first such side (containing vertex 0), if any.
    """
    if isinstance(graph, PlantedInstance):
        graph = graph.graph
    if not graph.is_regular(d1 + d2):
        return MembershipResult(False, None, 0)
    masks, checked = _scan(graph, d1, d2, what="membership scan")
    witness = mask_to_vertices(masks[0], graph.num_vertices) if masks else None
    return MembershipResult(bool(masks), witness, checked)


@dataclass
class ExpansionReport:
    gamma: float
    bound: float
    degree: int
    worst_ratio: float | None
    witness: list | None
    violations: int
    checked_count: int
    vacuous: bool = False
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.violations == 0

    def to_dict(self):
        return {
            "gamma": self.gamma,
            "bound": self.bound,
            "degree": self.degree,
            "worst_ratio": self.worst_ratio,
            "witness": self.witness,
            "violations": self.violations,
            "checked_count": self.checked_count,
            "vacuous": self.vacuous,
            "passed": self.passed,
        }


def edge_expansion_check(graph, gamma=None, seed=0, atol=1e-9):
    """Verify ``|boundary(S)| >= (gamma / 2) d |S|`` for every ``S`` with ``|S| <= N / 2``.

    ``gamma`` defaults to the spectral gap of the (regular) graph computed by
    power iteration. Reports the worst ratio ``|boundary(S)| / (d |S|)`` and
    a set attaining it.
    """
    n2 = graph.num_vertices
    if n2 > MAX_EXPANSION_VERTICES:
        raise BudgetError(
            f"expansion scan on {n2} vertices (max {MAX_EXPANSION_VERTICES})", 2.0**n2, 2.0**MAX_EXPANSION_VERTICES
        )
    if not graph.is_regular():
        raise ValidationError("edge expansion check needs a regular graph")
    d = int(graph.degrees[0])
    if gamma is None:
        if n2 == 1 or d == 0:
            gamma = 0.0
        else:
            gamma = 1.0 - second_eigenvector(graph, seed=seed).lambda2 / d
    bound = gamma / 2
    report = ExpansionReport(gamma, bound, d, None, None, 0, 0, vacuous=gamma <= atol)
    if d == 0:
        report.notes.append("edgeless graph")
        return report
    nbr = _neighbor_masks(graph)
    half = n2 // 2
    total = 1 << n2
    worst = np.inf
    worst_mask = None
    for s in range(1, total, _BLOCK):
        m = np.arange(s, min(total, s + _BLOCK), dtype=np.int64)
        size = np.bitwise_count(m).astype(np.int64)
        keep = size <= half
        m, size = m[keep], size[keep]
        boundary = np.zeros(m.size, dtype=np.int64)
        for v in range(n2):
            member = (m >> v) & 1 == 1
            boundary += np.where(member, d - np.bitwise_count(m & nbr[v]), 0)
        ratio = boundary / (d * size)
        report.checked_count += m.size
        report.violations += int(np.count_nonzero(ratio < bound - atol))
        i = int(np.argmin(ratio))
        if ratio[i] < worst:
            worst, worst_mask = float(ratio[i]), int(m[i])
    report.worst_ratio = worst
    report.witness = mask_to_vertices(worst_mask, n2)
    if report.vacuous:
        report.notes.append("spectral gap is zero; the bound is vacuous")
    return report
