import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rsbm import (
    Graph,
    RsbmParams,
    SamplingError,
    ValidationError,
    matvec,
    sample_bipartite_config,
    sample_lift,
    sample_regular_config,
    sample_rsbm,
    validate_instance,
)
from rsbm.graphgen import _lift_permutations, simplicity_trials, with_graph

from conftest import complete_graph


def test_regular_config_d3_n4_is_k4():
    for seed in range(5):
        assert sample_regular_config(4, 3, seed=seed) == complete_graph(4)


def test_regular_config_parity_error():
    with pytest.raises(ValidationError):
        sample_regular_config(5, 3, seed=0)


@pytest.mark.parametrize("method", ["rejection", "pairing"])
def test_regular_config_is_regular_and_simple(method):
    g = sample_regular_config(60, 5 if method == "pairing" else 3, seed=3, method=method)
    assert g.is_regular()
    assert len(set(map(tuple, g.edges().tolist()))) == g.num_edges


def test_rejection_budget_exhausted():
    with pytest.raises(SamplingError) as info:
        sample_regular_config(200, 12, seed=0, max_rejects=2, method="rejection")
    assert info.value.attempts == 2


def test_bipartite_k33():
    g = sample_bipartite_config(3, 3, seed=1)
    expected = Graph.from_edges(6, np.array([(u, v) for u in range(3) for v in range(3, 6)]))
    assert g == expected


def test_bipartite_matching():
    g = sample_bipartite_config(4, 1, seed=2)
    assert g.is_regular(1)
    assert all(u < 4 <= v for u, v in g.edges().tolist())


def test_bipartite_degree_three():
    g = sample_bipartite_config(50, 3, seed=4)
    assert g.is_regular(3)
    assert all(u < 50 <= v for u, v in g.edges().tolist())


def test_rsbm_eigen_identities():
    inst = sample_rsbm(RsbmParams(100, 10, 2), seed=1)
    e = np.ones(200)
    assert np.array_equal(matvec(inst.graph, e), 12 * e)
    assert np.array_equal(matvec(inst.graph, inst.sigma), 8 * inst.sigma)
    assert validate_instance(inst).ok


def test_rsbm_deterministic():
    p = RsbmParams(80, 6, 3)
    a, b = sample_rsbm(p, seed=11), sample_rsbm(p, seed=11)
    assert a.graph == b.graph
    assert np.array_equal(a.labels, b.labels)
    assert sample_rsbm(p, seed=12).graph != a.graph


def test_rsbm_labels_are_relabelled():
    inst = sample_rsbm(RsbmParams(50, 4, 3), seed=5)
    assert (inst.labels == 1).sum() == 50
    assert not np.array_equal(inst.labels, np.repeat([1, -1], 50))


def test_lift_identities():
    inst = sample_lift(RsbmParams(100, 10, 2), seed=1)
    assert inst.sampler == "permutation"
    assert validate_instance(inst).ok
    assert np.array_equal(matvec(inst.graph, inst.sigma), 8 * inst.sigma)


def test_lift_needs_even_d1():
    with pytest.raises(ValidationError, match="parity"):
        sample_lift(RsbmParams(100, 11, 3), seed=0)


def test_lift_single_vertex_fails():
    # (n=1, d1=2) breaks the d1 < n invariant before any sampling starts
    with pytest.raises(ValidationError):
        sample_lift((1, 2, 3), seed=0)
    # on one element every permutation is the identity and makes a loop
    with pytest.raises(SamplingError) as info:
        _lift_permutations(np.random.default_rng(0), 1, 1, True, 50)
    assert info.value.attempts == 50


def test_audit_flags_deleted_edge():
    inst = sample_rsbm(RsbmParams(30, 4, 3), seed=0)
    edges = inst.graph.edges()[1:]
    broken = with_graph(inst, Graph.from_edges(60, edges))
    report = validate_instance(broken)
    assert "degree_regularity" in report.violations


def test_audit_flags_flipped_label():
    from dataclasses import replace

    inst = sample_rsbm(RsbmParams(30, 4, 3), seed=0)
    labels = inst.labels.copy()
    labels[7] *= -1
    report = validate_instance(replace(inst, labels=labels))
    assert {"within_degree", "cross_degree"} <= set(report.violations)


def test_simplicity_rate_small():
    # exact simple fraction among all 11!! pairings of 12 half-edges on 4 vertices
    hits = simplicity_trials(4, 3, 4000, seed=0)
    points = list(range(12))

    def pairings(pts):
        if not pts:
            yield []
            return
        a = pts[0]
        for i in range(1, len(pts)):
            rest = pts[1:i] + pts[i + 1 :]
            for p in pairings(rest):
                yield [(a, pts[i])] + p

    simple = total = 0
    for p in pairings(points):
        total += 1
        e = [tuple(sorted((u // 3, v // 3))) for u, v in p]
        simple += all(u != v for u, v in e) and len(set(e)) == len(e)
    rate = simple / total
    se = np.sqrt(rate * (1 - rate) / 4000)
    assert abs(hits / 4000 - rate) < 4 * se


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from([(3, 3), (4, 3), (6, 2), (5, 1), (2, 2)]),
    st.integers(6, 30),
    st.integers(0, 2**32),
)
def test_rsbm_invariants(degrees, n, seed):
    d1, d2 = degrees
    if n * d1 % 2 or d1 >= n:
        n += 1
    inst = sample_rsbm(RsbmParams(n, d1, d2), seed=seed)
    assert validate_instance(inst).ok


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(4, 3), (6, 2), (2, 3)]), st.integers(8, 30), st.integers(0, 2**32))
def test_lift_invariants(degrees, n, seed):
    inst = sample_lift(RsbmParams(n, *degrees), seed=seed)
    assert validate_instance(inst).ok


def test_pairing_and_rejection_cover_all_k33_matchings():
    seen = set()
    for seed in range(40):
        g = sample_bipartite_config(3, 2, seed=seed, method="pairing")
        seen.add(tuple(map(tuple, g.edges().tolist())))
    # 2-regular bipartite simple graphs on 3+3 vertices: complements of perfect matchings of K33
    assert len(seen) == 6
    assert all(len(e) == 6 for e in seen)
    for e in seen:
        assert all(u < 3 <= v for u, v in e)
    assert len(list(itertools.permutations(range(3)))) == 6
