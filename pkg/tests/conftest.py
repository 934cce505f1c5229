import itertools

import numpy as np
import pytest

from rsbm import Graph


def complete_graph(n):
    return Graph.from_edges(n, np.array(list(itertools.combinations(range(n), 2))))


def cycle_graph(n):
    return Graph.from_edges(n, np.array([(i, (i + 1) % n) for i in range(n)]))


def path_graph(n):
    return Graph.from_edges(n, np.array([(i, i + 1) for i in range(n - 1)]).reshape(-1, 2))


def disjoint_k4s():
    edges = list(itertools.combinations(range(4), 2)) + list(itertools.combinations(range(4, 8), 2))
    return Graph.from_edges(8, np.array(edges))


def random_simple_graph(rng, n, p):
    a = np.triu(rng.random((n, n)) < p, 1)
    return Graph.from_dense((a | a.T).astype(np.int64))


@pytest.fixture
def k4():
    return complete_graph(4)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
