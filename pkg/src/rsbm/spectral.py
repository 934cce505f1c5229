"""Power iteration with deflation for symmetric graph operators.

The solvers accept a :class:`~rsbm.graph.Graph` (adjacency operator) or a
dense symmetric numpy array (used for self-avoiding-walk matrices). Every
iteration runs on a shifted operator ``c I + M`` or ``c I - M`` with ``c`` an
upper bound on the spectral radius, so the iterated operator is positive
semidefinite and power iteration converges to the algebraically largest or
smallest eigenvalue instead of oscillating between ``+lambda`` and
``-lambda``. Deflation re-orthogonalises against the already converged
vectors at every step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import ConvergenceError, ValidationError
from .graph import Graph

__all__ = [
    "matvec",
    "top_eigenpairs",
    "second_eigenvector",
    "power_iteration",
    "SpectrumSummary",
    "SecondEigenpair",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
STAGNATION_WINDOW = 1000


def matvec(graph, x):
    """``(A x)_i = sum of x_j over neighbours j of i``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (graph.num_vertices,):
        raise ValidationError(
            f"length mismatch: vector of shape {x.shape} for {graph.num_vertices} vertices"
        )
    return np.bincount(graph.rows, weights=x[graph.indices], minlength=graph.num_vertices)


class _Operator:
    def __init__(self, obj):
        if isinstance(obj, Graph):
            self.size = obj.num_vertices
            self.apply = lambda x: matvec(obj, x)
            deg = obj.degrees
            self.bound = float(deg.max()) if deg.size else 0.0
            self.regular_degree = float(deg[0]) if deg.size and obj.is_regular() else None
        else:
            m = np.asarray(obj, dtype=np.float64)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValidationError("operator must be a Graph or a square matrix")
            if not np.allclose(m, m.T):
                raise ValidationError("operator must be symmetric")
            self.size = m.shape[0]
            self.apply = m.__matmul__
            self.bound = float(np.abs(m).sum(axis=1).max()) if m.size else 0.0
            rows = m.sum(axis=1)
            self.regular_degree = float(rows[0]) if np.allclose(rows, rows[0]) else None


def _orthogonalize(x, basis):
    # two passes of classical Gram-Schmidt
    for _ in range(2):
        for b in basis:
            x -= (b @ x) * b
    return x


def power_iteration(
    operator,
    basis=(),
    sign=1,
    tolerance=DEFAULT_TOL,
    max_iter=DEFAULT_MAX_ITER,
    rng=None,
):
    """Extreme eigenpair of a symmetric operator on the complement of ``basis``.

    ``sign=+1`` targets the largest eigenvalue, ``sign=-1`` the smallest.
    ``basis`` holds orthonormal vectors to deflate. Returns
    ``(value, vector, residual, iterations)`` where the residual is
    ``||M v - value v||``. Raises ``ConvergenceError`` if the residual never
    drops below ``tolerance``.
    """
    op = operator if isinstance(operator, _Operator) else _Operator(operator)
    rng = np.random.default_rng(rng)
    n = op.size
    if n - len(basis) < 1:
        raise ValidationError("nothing left to iterate on: basis spans the whole space")
    shift = op.bound
    scale = max(shift, 1.0)

    def start():
        x = _orthogonalize(rng.uniform(-1.0, 1.0, n), basis)
        return x / np.linalg.norm(x)

    x = start()
    best = np.inf
    best_at = 0
    total = 0
    for it in range(1, max_iter + 1):
        total = it
        y = op.apply(x)
        lam = float(x @ y)
        r = float(np.linalg.norm(y - lam * x))
        if r <= tolerance:
            return lam, x, r, it
        if r < 0.99 * best:
            best, best_at = r, it
        elif it - best_at >= STAGNATION_WINDOW:
            x = start()
            best_at = it
            continue
        z = _orthogonalize(shift * x + sign * y, basis)
        nz = np.linalg.norm(z)
        if nz <= 1e-300 * scale:
            x = start()
            continue
        x = z / nz
    raise ConvergenceError("power iteration did not converge", best, total)


@dataclass
class SpectrumSummary:
    """Leading eigenpairs of a symmetric operator, by descending ``|lambda|``.

    ``gamma`` is the spectral gap ``1 - lambda_2 / d`` for a ``d``-regular
    graph, where ``lambda_2`` is the largest eigenvalue on the complement of
    the constant vector; it is ``None`` for non-regular operators.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    iterations: np.ndarray
    gamma: float | None = None
    lambda2: float | None = None
    seed: int | None = None
    tolerance: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    analytic_first: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "residuals": [float(v) for v in self.residuals],
            "iterations": [int(v) for v in self.iterations],
            "gamma": self.gamma,
            "lambda2": self.lambda2,
            "analytic_first": self.analytic_first,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "max_iter": self.max_iter,
        }


def _per_pair(value, k, name):
    if np.ndim(value) == 0:
        return [value] * k
    value = list(value)
    if len(value) != k:
        raise ValidationError(f"{name} needs one entry per eigenpair ({k})")
    return value


def top_eigenpairs(
    operator,
    k,
    tolerance=DEFAULT_TOL,
    max_iter=DEFAULT_MAX_ITER,
    seed=None,
    analytic_first=True,
):
    """The ``k`` eigenpairs of largest magnitude.

    Each pair is the winner, by ``|lambda|``, of two deflated power
    iterations (towards the top and towards the bottom of the remaining
    spectrum). On a regular operator the first pair ``(d, e / sqrt(N))`` is
    taken analytically and checked rather than iterated, unless
    ``analytic_first`` is false. ``tolerance`` and ``max_iter`` may be given
    per pair, which is useful because bulk eigenvalues converge far more
    slowly than isolated ones.
    """
    op = _Operator(operator)
    if not 1 <= k <= op.size:
        raise ValidationError(f"k must be in [1, {op.size}], got {k}")
    tols = _per_pair(tolerance, k, "tolerance")
    iters = _per_pair(max_iter, k, "max_iter")
    if any(t <= 0 for t in tols):
        raise ValidationError("tolerance must be positive")
    rng = np.random.default_rng(seed)

    values, vectors, residuals, counts = [], [], [], []
    lambda2 = None
    start = 0
    if analytic_first and op.regular_degree is not None:
        e = np.full(op.size, 1.0 / np.sqrt(op.size))
        d = op.regular_degree
        r = float(np.linalg.norm(op.apply(e) - d * e))
        if r > tols[0]:
            raise ConvergenceError("constant vector is not an eigenvector", r, 0)
        values.append(d)
        vectors.append(e)
        residuals.append(r)
        counts.append(0)
        start = 1

    for i in range(start, k):
        top = power_iteration(op, vectors, +1, tols[i], iters[i], rng)
        if i == 1 and values and values[0] == op.regular_degree:
            lambda2 = top[0]
        if len(vectors) + 1 >= op.size:
            best = top
        else:
            bottom = power_iteration(op, vectors, -1, tols[i], iters[i], rng)
            best = top if abs(top[0]) >= abs(bottom[0]) else bottom
            best = (best[0], best[1], best[2], top[3] + bottom[3])
        values.append(best[0])
        vectors.append(best[1])
        residuals.append(best[2])
        counts.append(best[3])

    gamma = None
    if op.regular_degree and lambda2 is not None:
        gamma = 1.0 - lambda2 / op.regular_degree
    return SpectrumSummary(
        eigenvalues=np.array(values),
        eigenvectors=np.array(vectors),
        residuals=np.array(residuals),
        iterations=np.array(counts, dtype=np.int64),
        gamma=gamma,
        lambda2=lambda2,
        seed=seed,
        tolerance=tolerance,
        max_iter=max_iter,
        analytic_first=start == 1,
    )


class SecondEigenpair(NamedTuple):
    lambda2: float
    v2: np.ndarray
    residual: float
    iterations: int
    degenerate: bool | None


def second_eigenvector(
    operator,
    tolerance=DEFAULT_TOL,
    max_iter=DEFAULT_MAX_ITER,
    seed=None,
    check_multiplicity=False,
    deflate=None,
):
    """Largest eigenpair on the orthogonal complement of the constant vector.

    For a regular graph this is the second eigenpair of the adjacency
    matrix. ``deflate`` replaces the constant vector by another unit vector
    (the dominant eigenvector of a non-regular operator). With
    ``check_multiplicity`` a further deflated iteration decides whether the
    eigenvalue is repeated; ``degenerate`` is ``None`` when not checked.
    """
    op = _Operator(operator)
    if deflate is None:
        if op.regular_degree is None:
            raise ValidationError("second_eigenvector needs a regular operator or an explicit deflation vector")
        first = np.full(op.size, 1.0 / np.sqrt(op.size))
    else:
        first = np.asarray(deflate, dtype=np.float64)
        first = first / np.linalg.norm(first)
    rng = np.random.default_rng(seed)
    lam, v, r, it = power_iteration(op, [first], +1, tolerance, max_iter, rng)
    degenerate = None
    if check_multiplicity:
        if op.size <= 2:
            degenerate = False
        else:
            nxt = power_iteration(op, [first, v], +1, tolerance, max_iter, rng)
            gap_tol = max(1e3 * tolerance, 1e-8) * max(op.bound, 1.0)
            degenerate = abs(nxt[0] - lam) <= gap_tol
            it += nxt[3]
    return SecondEigenpair(lam, v, r, it, degenerate)
