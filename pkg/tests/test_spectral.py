import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from rsbm import ConvergenceError, Graph, RsbmParams, ValidationError, matvec, sample_rsbm, second_eigenvector, top_eigenpairs

from conftest import complete_graph, cycle_graph, disjoint_k4s, random_simple_graph


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, np.array(outer + spokes + inner))


def test_matvec_single_edge():
    g = Graph.from_edges(2, np.array([[0, 1]]))
    assert np.array_equal(matvec(g, np.array([1.0, 0.0])), [0.0, 1.0])


def test_matvec_length_mismatch():
    with pytest.raises(ValidationError):
        matvec(complete_graph(4), np.ones(3))


def test_k4_spectrum():
    s = top_eigenpairs(complete_graph(4), 4, seed=0)
    assert s.eigenvalues[0] == 3
    assert np.allclose(s.eigenvalues[1:], -1, atol=1e-8)
    assert s.gamma == pytest.approx(4 / 3, abs=1e-8)


def test_two_k4s():
    pair = second_eigenvector(disjoint_k4s(), seed=1)
    assert pair.lambda2 == pytest.approx(3, abs=1e-8)
    v = pair.v2
    assert np.allclose(v[:4], v[0], atol=1e-6) and np.allclose(v[4:], v[4], atol=1e-6)
    assert v[0] == pytest.approx(-v[4], abs=1e-6)


def test_degenerate_second_eigenvalue_flagged():
    g = petersen()
    truth = np.linalg.eigvalsh(g.to_dense().astype(float))[::-1]
    assert truth[1] == pytest.approx(truth[2])
    pair = second_eigenvector(g, seed=0, check_multiplicity=True)
    assert pair.lambda2 == pytest.approx(truth[1], abs=1e-8)
    assert pair.degenerate is True
    distinct = second_eigenvector(disjoint_k4s(), seed=0, check_multiplicity=True)
    assert distinct.degenerate is False


def test_needs_regular_operator():
    g = Graph.from_edges(3, np.array([[0, 1], [1, 2]]))
    with pytest.raises(ValidationError):
        second_eigenvector(g)


def test_convergence_error_carries_residual():
    inst = sample_rsbm(RsbmParams(200, 10, 2), seed=0)
    with pytest.raises(ConvergenceError) as info:
        top_eigenpairs(inst.graph, 3, tolerance=1e-14, max_iter=5, seed=0)
    assert info.value.best_residual > 0


def test_rsbm_second_eigenpair():
    inst = sample_rsbm(RsbmParams(500, 10, 2), seed=3)
    pair = second_eigenvector(inst.graph, seed=3)
    assert pair.lambda2 == pytest.approx(8, abs=1e-6)
    assert abs(pair.v2 @ inst.sigma) / np.sqrt(1000) > 0.99


@pytest.mark.parametrize("seed", range(6))
def test_top_eigenpairs_against_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    g = random_simple_graph(rng, 14, 0.4)
    m = g.to_dense().astype(float)
    w = np.linalg.eigvalsh(m)
    order = np.argsort(-np.abs(w), kind="stable")
    s = top_eigenpairs(g, 3, tolerance=1e-9, seed=seed)
    for lam, v, ref in zip(s.eigenvalues, s.eigenvectors, w[order][:3]):
        assert abs(lam) == pytest.approx(abs(ref), abs=1e-6)
        assert abs(v @ m @ v - lam) <= 10 * 1e-9
    gram = s.eigenvectors @ s.eigenvectors.T
    assert np.allclose(gram, np.eye(3), atol=1e-8)


def test_cycle_regular_spectrum():
    g = cycle_graph(9)
    s = top_eigenpairs(g, 3, tolerance=1e-9, seed=0)
    assert s.eigenvalues[0] == 2
    assert s.lambda2 == pytest.approx(2 * np.cos(2 * np.pi / 9), abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, 12, elements=st.floats(-1e3, 1e3)),
    arrays(np.float64, 12, elements=st.floats(-1e3, 1e3)),
    st.floats(-10, 10),
    st.floats(-10, 10),
)
def test_matvec_linearity(x, y, a, b):
    g = random_simple_graph(np.random.default_rng(1), 12, 0.5)
    lhs = matvec(g, a * x + b * y)
    rhs = a * matvec(g, x) + b * matvec(g, y)
    scale = np.abs(matvec(g, np.abs(a * x)) + matvec(g, np.abs(b * y))).max() + 1.0
    assert np.abs(lhs - rhs).max() <= 1e-12 * scale


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_matvec_matches_dense(seed):
    rng = np.random.default_rng(seed)
    g = random_simple_graph(rng, 10, 0.3)
    x = rng.normal(size=10)
    assert np.allclose(matvec(g, x), g.to_dense() @ x)
