"""scikit-learn style wrappers around the recovery pipeline.

Both estimators take a graph as ``X`` (see :func:`check_graph` for the
accepted types) and expose the recovered +-1 labels as ``labels_``, so they
work with ``fit_predict``, ``get_params``/``set_params`` and ``clone``.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_graph, check_labels
from .recovery import majority_iterate, overlap, spectral_recover
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL

__all__ = ["SpectralPartition", "MajorityDynamics"]


class SpectralPartition(ClusterMixin, BaseEstimator):
    """Two-community partition of a regular graph.

    Parameters
    ----------
    method : {"adjacency", "saw"}
        Operator whose second eigenvector is rounded: the adjacency matrix or
        the self-avoiding-walk matrix of depth ``l``.
    l : int or None
        Walk length for ``method="saw"``.
    tolerance, max_iter :
        Power-iteration residual target and iteration cap.
    max_rounds : int or None
        Cap on majority rounds after rounding; ``None`` means
        ``ceil(4 log2 N) + 10``.
    balanced : bool
        Round by giving +1 to the top half of coordinates instead of by sign.
    random_state : int or None
        Seed of the power-iteration start vector.

    Attributes
    ----------
    labels_ : ndarray of shape (n_vertices,)
        Recovered +-1 labels.
    initial_labels_ : ndarray
        Labels right after rounding, before majority dynamics.
    eigenvalue_ : float
        Second eigenvalue of the chosen operator.
    n_rounds_ : int
    converged_ : bool
    result_ : RecoveryResult
    """

    def __init__(
        self,
        method="adjacency",
        l=None,
        tolerance=DEFAULT_TOL,
        max_iter=DEFAULT_MAX_ITER,
        max_rounds=None,
        balanced=False,
        random_state=None,
    ):
        self.method = method
        self.l = l
        self.tolerance = tolerance
        self.max_iter = max_iter
        self.max_rounds = max_rounds
        self.balanced = balanced
        self.random_state = random_state

    def fit(self, X, y=None):
        graph = check_graph(X)
        planted = check_labels(y, graph.num_vertices)
        method = {"adjacency": "spectral_adjacency", "saw": "spectral_saw"}.get(self.method, self.method)
        result = spectral_recover(
            graph,
            method=method,
            l=self.l,
            planted=planted,
            tolerance=self.tolerance,
            max_iter=self.max_iter,
            max_rounds=self.max_rounds,
            seed=self.random_state,
            balanced=self.balanced,
        )
        self.result_ = result
        self.labels_ = result.final_labels
        self.initial_labels_ = result.initial_labels
        self.eigenvalue_ = result.eigenvalue
        self.n_rounds_ = result.rounds_used
        self.converged_ = result.converged
        return self

    def score(self, X, y):
        """Agreement (up to a global flip) between the fitted labels and ``y``."""
        check_is_fitted(self, "labels_")
        graph = check_graph(X)
        return overlap(self.labels_, check_labels(y, graph.num_vertices))[0]


class MajorityDynamics(ClusterMixin, BaseEstimator):
    """Synchronous majority relabelling started from ``init``.

    Parameters
    ----------
    init : array-like of +-1
        Starting labels.
    max_rounds : int or None
        Round cap; ``None`` means ``ceil(4 log2 N) + 10``.
    """

    def __init__(self, init=None, max_rounds=None):
        self.init = init
        self.max_rounds = max_rounds

    def fit(self, X, y=None):
        graph = check_graph(X)
        if self.init is None:
            raise ValueError("MajorityDynamics needs starting labels in `init`")
        start = check_labels(np.asarray(self.init), graph.num_vertices)
        result = majority_iterate(graph, start, self.max_rounds, check_labels(y, graph.num_vertices))
        self.result_ = result
        self.labels_ = result.final_labels
        self.n_rounds_ = result.rounds_used
        self.converged_ = result.converged
        return self
