"""Recovering the planted partition: majority dynamics and spectral rounding."""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .graph import Graph, PlantedInstance, as_labels
from .model import check_thresholds
from .saw import build_saw, saw_recover, DEFAULT_BUDGET
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL, matvec, second_eigenvector

__all__ = [
    "RecoveryResult",
    "ThresholdWarning",
    "default_max_rounds",
    "majority_step",
    "majority_iterate",
    "overlap",
    "round_vector",
    "spectral_recover",
]

METHODS = ("spectral_adjacency", "spectral_saw", "majority_only")


class ThresholdWarning(UserWarning):
    """The degrees are outside the regime where recovery is guaranteed."""


def overlap(labels_a, labels_b):
    """Agreement of two labellings up to a global sign flip.

    Returns ``(agreement, errors)`` with ``agreement`` in ``[1/2, 1]``.
    """
    a = as_labels(labels_a)
    b = as_labels(labels_b, a.shape[0])
    n = a.shape[0]
    same = int(np.count_nonzero(a == b))
    best = max(same, n - same)
    return best / n, n - best


def majority_step(graph, labels):
    """One synchronous round: every vertex takes the sign of its neighbours' label sum.

    A vertex whose neighbour sum is zero keeps its label.
    """
    s = as_labels(labels, graph.num_vertices)
    total = matvec(graph, s)
    out = np.where(total > 0, 1, np.where(total < 0, -1, s)).astype(np.int8)
    return out


def default_max_rounds(num_vertices):
    return math.ceil(4 * math.log2(num_vertices)) + 10


@dataclass
class RecoveryResult:
    """Trajectory of a recovery run.

    ``per_round_errors[0]`` is the error of the initial labelling and entry
    ``k`` the error after ``k`` majority rounds; it stays empty unless the
    planted labels were supplied. Errors are always counted up to a global
    sign flip.
    """

    initial_labels: np.ndarray
    final_labels: np.ndarray
    rounds_used: int
    converged: bool
    method: str
    per_round_errors: list = field(default_factory=list)
    agreement: float | None = None
    errors: int | None = None
    eigenvalue: float | None = None
    eigenvalue1: float | None = None
    l: int | None = None
    seed: int | None = None
    timings: dict = field(default_factory=dict)

    def to_dict(self, include_labels=False):
        out = {
            "method": self.method,
            "rounds": self.rounds_used,
            "converged": self.converged,
            "seed": self.seed,
        }
        if self.eigenvalue is not None:
            out["lambda2"] = self.eigenvalue
        if self.eigenvalue1 is not None:
            out["lambda1"] = self.eigenvalue1
        if self.l is not None:
            out["l"] = self.l
        if self.agreement is not None:
            out["agreement"] = self.agreement
            out["errors"] = self.errors
            out["per_round_errors"] = list(self.per_round_errors)
        if include_labels:
            out["labels"] = [int(v) for v in self.final_labels]
        return out


def majority_iterate(graph, labels, max_rounds=None, planted=None):
    """Apply :func:`majority_step` until a fixed point or ``max_rounds`` rounds."""
    cur = as_labels(labels, graph.num_vertices)
    if max_rounds is None:
        max_rounds = default_max_rounds(graph.num_vertices)
    if max_rounds < 1:
        raise ValidationError("max_rounds must be at least 1")
    truth = None if planted is None else as_labels(planted, graph.num_vertices)
    errors = [overlap(cur, truth)[1]] if truth is not None else []
    start = cur
    converged = False
    rounds = 0
    while rounds < max_rounds:
        nxt = majority_step(graph, cur)
        rounds += 1
        if truth is not None:
            errors.append(overlap(nxt, truth)[1])
        if np.array_equal(nxt, cur):
            converged = True
            break
        cur = nxt
    result = RecoveryResult(
        initial_labels=start,
        final_labels=cur,
        rounds_used=rounds,
        converged=converged,
        method="majority_only",
        per_round_errors=errors,
    )
    if truth is not None:
        result.agreement, result.errors = overlap(cur, truth)
    return result


def round_vector(v, balanced=False):
    """Labels from an eigenvector: ``+1`` where ``v > 0`` (zeros go to ``+1``).

    With ``balanced`` the ``N // 2`` largest coordinates get ``+1`` instead.
    """
    v = np.asarray(v, dtype=np.float64)
    if balanced:
        out = -np.ones(v.size, dtype=np.int8)
        out[np.argsort(-v, kind="stable")[: v.size // 2]] = 1
        return out
    return np.where(v >= 0, 1, -1).astype(np.int8)


def _unpack(target, planted, params):
    if isinstance(target, PlantedInstance):
        planted = target.labels if planted is None else planted
        params = target.params if params is None else params
        return target.graph, planted, params
    if not isinstance(target, Graph):
        raise ValidationError("expected a Graph or a PlantedInstance")
    return target, planted, params


def spectral_recover(
    target,
    method="spectral_adjacency",
    l=None,
    planted=None,
    params=None,
    tolerance=DEFAULT_TOL,
    max_iter=DEFAULT_MAX_ITER,
    max_rounds=None,
    seed=None,
    balanced=False,
    init_labels=None,
    budget=DEFAULT_BUDGET,
):
    """Sign-round the second eigenvector, then clean up with majority dynamics.

    ``method`` is ``"spectral_adjacency"`` (adjacency matrix),
    ``"spectral_saw"`` (self-avoiding-walk matrix of depth ``l``) or
    ``"majority_only"`` (start from ``init_labels``). When ``params`` are
    known and the spectral condition fails a :class:`ThresholdWarning` is
    emitted; the pipeline still runs.
    """
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}; expected one of {METHODS}")
    graph, planted, params = _unpack(target, planted, params)
    if params is not None and method != "majority_only":
        if not check_thresholds(params.d1, params.d2).spectral_condition:
            warnings.warn(
                f"(d1, d2) = ({params.d1}, {params.d2}) fails (d1-d2)^2 > 4(d1+d2-1); "
                "recovery is not guaranteed",
                ThresholdWarning,
                stacklevel=2,
            )

    timings = {}
    t0 = time.perf_counter()
    lam = lam1 = None
    if method == "spectral_adjacency":
        pair = second_eigenvector(graph, tolerance, max_iter, seed)
        lam = pair.lambda2
        start = round_vector(pair.v2, balanced)
    elif method == "spectral_saw":
        if l is None:
            raise ValidationError("spectral_saw needs the walk length l")
        saw = build_saw(graph, l, budget)
        timings["saw"] = time.perf_counter() - t0
        if l == 1:
            # S^(1) is the adjacency matrix; reuse the regular-graph deflation
            pair = second_eigenvector(saw.counts, tolerance, max_iter, seed)
            lam, v2 = pair.lambda2, pair.v2
        else:
            spec = saw_recover(graph, l, None, max_iter, seed, saw=saw)
            lam, lam1, v2 = spec.lambda2, spec.lambda1, spec.v2
        start = round_vector(v2, balanced)
    else:
        if init_labels is None:
            raise ValidationError("majority_only needs init_labels")
        start = as_labels(init_labels, graph.num_vertices)
    t1 = time.perf_counter()
    timings["spectral"] = t1 - t0

    result = majority_iterate(graph, start, max_rounds, planted)
    timings["majority"] = time.perf_counter() - t1
    result.method = method
    result.eigenvalue = lam
    result.eigenvalue1 = lam1
    result.l = l if method == "spectral_saw" else None
    result.seed = seed
    result.timings = timings
    return result
