"""Samplers for regular graphs and RSBM instances.

Random numbers come from numpy's PCG64 bit generator seeded through
``numpy.random.SeedSequence``. An RSBM sample spawns four child sequences
(relabelling, side A, side B, cross edges) so the three component graphs
use independent streams.

Two strategies build a uniform-looking simple regular graph from half-edges:

* ``"rejection"`` draws whole uniform perfect matchings and keeps the first
  simple one. The output is exactly uniform, but the acceptance probability
  behaves like ``exp((1 - d**2) / 4)`` and is useless beyond ``d ~ 4``.
* ``"pairing"`` repeatedly reshuffles the half-edges that are still free and
  keeps every pair that creates neither a loop nor a repeated edge, restarting
  from scratch when the leftovers cannot be completed. This is the
  Steger-Wormald scheme; it is asymptotically uniform for fixed ``d``.

``method="auto"`` picks rejection when the expected number of successes
within ``max_rejects`` attempts is comfortably large and pairing otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import SamplingError, ValidationError
from .graph import Graph, PlantedInstance, as_labels
from .model import RsbmParams

__all__ = [
    "make_rng",
    "sample_regular_config",
    "sample_bipartite_config",
    "simplicity_trials",
    "sample_rsbm",
    "sample_lift",
    "validate_instance",
    "AuditReport",
]

_BATCH = 256
_LIFT_BATCH = 512
DEFAULT_MAX_REJECTS = 1000
DEFAULT_LIFT_REJECTS = 200_000


def make_rng(seed):
    """PCG64 generator from an int seed or a ``SeedSequence``."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(seed))


def _fresh_seed():
    return int(np.random.SeedSequence().entropy % (2**63))


def _check_regular(n, d):
    if n < 1 or d < 0:
        raise ValidationError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    if (n * d) % 2:
        raise ValidationError(f"parity invariant violated: n*d = {n * d} half-edges is odd")
    if d >= n and d > 0:
        raise ValidationError(f"simple-graph invariant violated: d={d} must be < n={n}")


def _check_bipartite(n, d):
    if n < 1 or d < 0:
        raise ValidationError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    if d > n:
        raise ValidationError(f"bipartite invariant violated: d={d} must be <= n={n}")


def _simple_acceptance(d, bipartite):
    # asymptotic probability that a uniform pairing is simple
    if bipartite:
        return math.exp(-((d - 1) ** 2) / 2)
    return math.exp((1 - d * d) / 4)


def _pick_method(method, d, bipartite, max_rejects):
    if method not in ("auto", "rejection", "pairing"):
        raise ValidationError(f"unknown sampling method {method!r}")
    if method != "auto":
        return method
    expected = _simple_acceptance(d, bipartite) * max_rejects
    return "rejection" if expected >= 20 else "pairing"


# -- rejection --------------------------------------------------------------


def _batch_matchings(rng, n, d, count, bipartite):
    """``count`` uniform pairings as (count, m) endpoint arrays."""
    stubs = np.repeat(np.arange(n), d)
    if bipartite:
        right = rng.permuted(np.broadcast_to(stubs, (count, stubs.size)), axis=1)
        left = np.broadcast_to(stubs, right.shape)
        return left, right
    perm = rng.permuted(np.broadcast_to(stubs, (count, stubs.size)), axis=1)
    return perm[:, 0::2], perm[:, 1::2]


def _simple_mask(u, v, n, bipartite):
    if bipartite:
        codes = u * n + v
        loops = np.zeros(u.shape[0], dtype=bool)
    else:
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        codes = lo * n + hi
        loops = np.any(lo == hi, axis=1)
    codes = np.sort(codes, axis=1)
    multi = np.any(codes[:, 1:] == codes[:, :-1], axis=1)
    return ~(loops | multi)


def _rejection(rng, n, d, max_rejects, bipartite):
    attempts = 0
    while attempts < max_rejects:
        count = min(_BATCH, max_rejects - attempts)
        u, v = _batch_matchings(rng, n, d, count, bipartite)
        ok = np.flatnonzero(_simple_mask(u, v, n, bipartite))
        if ok.size:
            k = ok[0]
            return np.column_stack([u[k], v[k]]), attempts + k + 1
        attempts += count
    kind = "bipartite " if bipartite else ""
    raise SamplingError(f"no simple {kind}{d}-regular pairing on n={n}", attempts)


def simplicity_trials(n, d, trials, seed=None, bipartite=False):
    """Draw ``trials`` uniform pairings and count how many are simple."""
    if bipartite:
        _check_bipartite(n, d)
    else:
        _check_regular(n, d)
    rng = make_rng(seed)
    simple = 0
    done = 0
    while done < trials:
        count = min(_BATCH, trials - done)
        u, v = _batch_matchings(rng, n, d, count, bipartite)
        simple += int(_simple_mask(u, v, n, bipartite).sum())
        done += count
    return simple


# -- pairing with restarts --------------------------------------------------


def _completable(left, right, codes, n, bipartite):
    """Whether some leftover pair could still become a new edge."""
    lv = np.unique(left)
    rv = np.unique(right)
    for a in lv:
        for b in rv:
            if not bipartite and a == b:
                continue
            lo, hi = (a, b) if bipartite or a < b else (b, a)
            if lo * n + hi not in codes:
                return True
    return False


def _pairing_attempt(rng, n, d, bipartite):
    stubs = np.repeat(np.arange(n), d)
    left = stubs.copy()
    right = stubs.copy() if bipartite else None
    codes = set()
    while left.size:
        if bipartite:
            rng.shuffle(right)
            u, v = left, right
            c = u * n + v
            ok = np.ones(u.size, dtype=bool)
        else:
            rng.shuffle(left)
            u, v = left[0::2], left[1::2]
            lo, hi = np.minimum(u, v), np.maximum(u, v)
            c = lo * n + hi
            ok = lo != hi
        if codes:
            ok &= ~np.isin(c, np.fromiter(codes, dtype=np.int64, count=len(codes)))
        first = np.zeros(c.size, dtype=bool)
        first[np.unique(c, return_index=True)[1]] = True
        ok &= first
        codes.update(c[ok].tolist())
        if bipartite:
            left, right = u[~ok], v[~ok]
            if left.size and not _completable(left, right, codes, n, True):
                return None
        else:
            left = np.concatenate([u[~ok], v[~ok]])
            if left.size and not _completable(left, left, codes, n, False):
                return None
    c = np.fromiter(sorted(codes), dtype=np.int64, count=len(codes))
    return np.column_stack([c // n, c % n])


def _pairing(rng, n, d, max_rejects, bipartite):
    for attempt in range(1, max_rejects + 1):
        edges = _pairing_attempt(rng, n, d, bipartite)
        if edges is not None:
            return edges, attempt
    kind = "bipartite " if bipartite else ""
    raise SamplingError(f"pairing failed to complete a {kind}{d}-regular graph on n={n}", max_rejects)


def _regular_edges(rng, n, d, max_rejects, method):
    if d == 0:
        return np.empty((0, 2), dtype=np.int64)
    if _pick_method(method, d, False, max_rejects) == "rejection":
        return _rejection(rng, n, d, max_rejects, False)[0]
    return _pairing(rng, n, d, max_rejects, False)[0]


def _bipartite_edges(rng, n, d, max_rejects, method):
    if d == 0:
        return np.empty((0, 2), dtype=np.int64)
    if _pick_method(method, d, True, max_rejects) == "rejection":
        return _rejection(rng, n, d, max_rejects, True)[0]
    return _pairing(rng, n, d, max_rejects, True)[0]


def sample_regular_config(n, d, seed=None, max_rejects=DEFAULT_MAX_REJECTS, method="auto"):
    """Random simple ``d``-regular graph on ``n`` vertices from the configuration model.

    Raises ``ValidationError`` when ``n * d`` is odd or ``d >= n`` and
    ``SamplingError`` when ``max_rejects`` attempts all fail.
    """
    _check_regular(n, d)
    edges = _regular_edges(make_rng(seed), n, d, max_rejects, method)
    return Graph.from_edges(n, edges)


def sample_bipartite_config(n, d, seed=None, max_rejects=DEFAULT_MAX_REJECTS, method="auto"):
    """Random simple ``d``-regular bipartite graph with sides ``0..n-1`` and ``n..2n-1``."""
    _check_bipartite(n, d)
    edges = _bipartite_edges(make_rng(seed), n, d, max_rejects, method)
    edges = edges + np.array([0, n])
    return Graph.from_edges(2 * n, edges)


def _compose(params, seed, sampler, relabel_rng, within_a, within_b, cross):
    n = params.n
    edges = np.concatenate([within_a, within_b + n, cross + np.array([0, n])])
    perm = relabel_rng.permutation(2 * n)
    labels = np.empty(2 * n, dtype=np.int8)
    labels[perm[:n]] = 1
    labels[perm[n:]] = -1
    graph = Graph.from_edges(2 * n, perm[edges])
    return PlantedInstance(
        graph=graph, labels=labels, params=params, seed=seed, sampler=sampler, relabeling=perm
    )


def _as_params(params):
    if isinstance(params, RsbmParams):
        return params
    if isinstance(params, dict):
        return RsbmParams(**params)
    return RsbmParams(*params)


def sample_rsbm(params, seed=None, max_rejects=DEFAULT_MAX_REJECTS, method="auto"):
    """Sample an RSBM instance with the configuration model.

    Two independent ``d1``-regular graphs on the communities are joined by an
    independent ``d2``-regular bipartite graph; a uniform relabelling then
    hides which vertices form each community.
    """
    params = _as_params(params)
    if seed is None:
        seed = _fresh_seed()
    streams = [make_rng(s) for s in np.random.SeedSequence(seed).spawn(4)]
    n, d1, d2 = params.n, params.d1, params.d2
    a = _regular_edges(streams[1], n, d1, max_rejects, method)
    b = _regular_edges(streams[2], n, d1, max_rejects, method)
    c = _bipartite_edges(streams[3], n, d2, max_rejects, method)
    return _compose(params, seed, "configuration", streams[0], a, b, c)


def _lift_permutations(rng, n, count, involutive, max_rejects):
    """Draw ``count`` permutations whose lifted edges keep the graph simple.

    With ``involutive`` (within-side lifts) an edge ``(i, p[i])`` is also
    ``(p[i], i)``, so fixed points and 2-cycles are forbidden and reversed
    coincidences with earlier permutations count as repeats.
    """
    idx = np.arange(n)
    dense = n <= 4096
    taken = np.zeros(n * n, dtype=bool) if dense else np.empty(0, dtype=np.int64)
    any_taken = False
    edges = []
    for j in range(count):
        attempts = 0
        found = None
        while found is None:
            if attempts >= max_rejects:
                raise SamplingError(
                    f"no compatible lift permutation {j + 1}/{count} on n={n}", attempts
                )
            batch = min(_LIFT_BATCH, max_rejects - attempts)
            perms = rng.permuted(np.broadcast_to(idx, (batch, n)), axis=1)
            # filter survivors stage by stage; rows stay in draw order
            rows = np.arange(batch)
            if involutive:
                rows = rows[~np.any(perms == idx, axis=1)]
                p = perms[rows]
                rows = rows[~np.any(np.take_along_axis(p, p, axis=1) == idx, axis=1)]
                p = perms[rows]
                codes = np.minimum(idx, p) * n + np.maximum(idx, p)
            else:
                codes = idx * n + perms
            if any_taken and rows.size:
                hit = taken[codes] if dense else np.isin(codes, taken)
                keep = ~hit.any(axis=1)
                rows, codes = rows[keep], codes[keep]
            if rows.size:
                k = rows[0]
                attempts += k + 1
                found = perms[k]
                if dense:
                    taken[codes[0]] = True
                else:
                    taken = np.union1d(taken, codes[0])
                any_taken = True
            else:
                attempts += batch
        edges.append(np.column_stack([idx, found]))
    if not edges:
        return np.empty((0, 2), dtype=np.int64)
    e = np.concatenate(edges)
    if involutive:
        e = np.column_stack([e.min(axis=1), e.max(axis=1)])
    return e


def sample_lift(params, seed=None, max_rejects=DEFAULT_LIFT_REJECTS):
    """Sample an RSBM instance from the permutation model (an ``n``-lift).

    The base multigraph has two vertices joined by ``d2`` parallel edges and
    ``d1 / 2`` loops on each; every base edge lifts through a uniform
    permutation. Permutations are drawn one at a time and each is redrawn
    until it adds no loop or repeated edge, so ``max_rejects`` bounds the
    draws per permutation. Requires ``d1`` even.
    """
    params = _as_params(params)
    if params.d1 % 2:
        raise ValidationError(
            f"parity invariant violated: the permutation model needs d1 even, got d1={params.d1}"
        )
    if seed is None:
        seed = _fresh_seed()
    streams = [make_rng(s) for s in np.random.SeedSequence(seed).spawn(4)]
    n, half = params.n, params.d1 // 2
    a = _lift_permutations(streams[1], n, half, True, max_rejects)
    b = _lift_permutations(streams[2], n, half, True, max_rejects)
    c = _lift_permutations(streams[3], n, params.d2, False, max_rejects)
    return _compose(params, seed, "permutation", streams[0], a, b, c)


@dataclass
class AuditReport:
    """Named invariant violations found by :func:`validate_instance`."""

    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.violations

    def add(self, name, detail):
        if name not in self.violations:
            self.violations.append(name)
        self.details.setdefault(name, detail)


def validate_instance(inst):
    """Check every graph and planted-partition invariant of ``inst``."""
    report = AuditReport()
    g, params = inst.graph, inst.params
    n2 = g.num_vertices
    rows, cols = g.rows, g.indices

    if n2 != params.num_vertices:
        report.add("vertex_count", f"{n2} vertices, expected {params.num_vertices}")
    if np.any(rows == cols):
        report.add("no_self_loops", f"self-loop at vertex {int(rows[rows == cols][0])}")
    codes = rows * n2 + cols
    if np.unique(codes).size != codes.size:
        report.add("no_repeated_neighbors", "some neighbour list repeats a vertex")
    if not np.array_equal(np.sort(codes), np.sort(cols * n2 + rows)):
        report.add("symmetry", "some edge appears in only one neighbour list")
    bad = np.flatnonzero(g.degrees != params.degree)
    if bad.size:
        report.add(
            "degree_regularity",
            f"vertex {int(bad[0])} has degree {int(g.degrees[bad[0]])}, expected {params.degree}",
        )

    try:
        labels = as_labels(inst.labels, n2)
    except ValidationError as exc:
        report.add("label_values", str(exc))
        return report
    if int((labels == 1).sum()) != params.n:
        report.add("label_balance", f"{int((labels == 1).sum())} vertices labelled +1, expected {params.n}")
    same = np.bincount(rows, weights=(labels[rows] == labels[cols]), minlength=n2)
    other = g.degrees - same
    bad = np.flatnonzero(same != params.d1)
    if bad.size:
        report.add(
            "within_degree",
            f"vertex {int(bad[0])} has {int(same[bad[0]])} same-label neighbours, expected {params.d1}",
        )
    bad = np.flatnonzero(other != params.d2)
    if bad.size:
        report.add(
            "cross_degree",
            f"vertex {int(bad[0])} has {int(other[bad[0]])} cross-label neighbours, expected {params.d2}",
        )
    return report


def with_graph(inst, graph):
    """Copy of ``inst`` carrying a different graph (for audits and tests)."""
    return replace(inst, graph=graph)
