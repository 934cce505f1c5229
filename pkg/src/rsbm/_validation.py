"""Input coercion used by the estimator classes."""

import numpy as np

from .exceptions import ValidationError
from .graph import Graph, PlantedInstance, as_labels


def check_graph(X):
    """Coerce ``X`` to a :class:`Graph`.

    Accepts a ``Graph``, a ``PlantedInstance``, a dense 0/1 adjacency array,
    anything with a ``tocoo()`` method (scipy sparse), or a networkx graph
    (nodes are taken in sorted order).
    """
    if isinstance(X, Graph):
        return X
    if isinstance(X, PlantedInstance):
        return X.graph
    if hasattr(X, "tocoo"):
        coo = X.tocoo()
        if coo.shape[0] != coo.shape[1]:
            raise ValidationError("adjacency matrix must be square")
        mask = coo.row < coo.col
        edges = np.column_stack([coo.row[mask], coo.col[mask]])
        graph = Graph.from_edges(coo.shape[0], edges)
        if graph.num_edges * 2 != int(np.count_nonzero(coo.data)):
            raise ValidationError("symmetry violated: adjacency matrix is not symmetric")
        return graph
    if hasattr(X, "number_of_nodes") and hasattr(X, "edges"):
        nodes = sorted(X.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        return Graph.from_edges(len(nodes), [(index[u], index[v]) for u, v in X.edges()])
    a = np.asarray(X)
    if a.ndim == 2:
        return Graph.from_dense(a)
    raise ValidationError(f"cannot interpret {type(X).__name__} as a graph")


def check_labels(y, num_vertices=None):
    if y is None:
        return None
    return as_labels(y, num_vertices)
