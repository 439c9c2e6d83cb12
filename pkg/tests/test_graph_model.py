import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpe_atlas import (HorizonExceeded, InvalidArgument, build_classical, build_example1,
                       build_example2, build_phi_graph, example1_weight, materialize_support)
from oracle import example1_weight_slow


def test_example1_weight_examples():
    assert example1_weight(5) == example1_weight(6) == 0.5
    assert example1_weight(4) == example1_weight(7) == example1_weight(8) == 1.0
    assert sum(example1_weight(k) == 0.5 for k in range(1, 17)) == 6


def test_example1_weight_matches_definition():
    ks = np.arange(0, 5000)
    fast = example1_weight(ks)
    slow = np.array([example1_weight_slow(int(k)) for k in ks])
    assert np.array_equal(fast, slow)


@pytest.mark.parametrize("n", range(2, 12))
def test_example1_bands(n):
    band = np.arange(2 ** n + 1, 3 * 2 ** (n - 1) + 1)
    gap = np.arange(3 * 2 ** (n - 1) + 1, 2 ** (n + 1) + 1)
    assert np.all(example1_weight(band) == 0.5)
    assert np.all(example1_weight(gap) == 1.0)


def test_build_example1_structure():
    g, w = build_example1(20)
    assert g.parent[0] == 0 and list(g.loops) == [0]
    assert w.lam[0] == 1.0 and w.lam[1] == 1.0
    assert g.n_vertices == 21
    assert list(materialize_support(g, 3)) == [0, 1, 2, 3]
    with pytest.raises(InvalidArgument):
        build_example1(1)
    with pytest.raises(HorizonExceeded):
        materialize_support(g, 21)


def test_build_example2_structure():
    g, w = build_example2(3, example1_weight, 10)
    assert list(g.children(0)) == [1, 2, 3]
    assert [g.label(v) for v in materialize_support(g, 1)] == [(0, 0), (1, 1), (1, 2), (1, 3)]
    other = np.array([g.label(v)[1] != 1 for v in range(1, g.n_vertices)])
    assert np.all(w.lam[1:][other] == 1.0)
    assert list(materialize_support(g, 0)) == [0]
    with pytest.raises(InvalidArgument):
        build_example2(0, example1_weight, 10)
    with pytest.raises(InvalidArgument):
        build_example2(2, [1.0, -1.0, 1.0], 3)


def test_example2_k1_is_classical():
    g1, w1 = build_example2(1, np.ones(12), 12)
    g2, w2 = build_classical(np.ones(12), 12)
    assert np.array_equal(g1.parent, g2.parent)
    assert np.array_equal(g1.level, g2.level)
    assert np.allclose(w1.lam[1:], w2.lam[1:])


def test_build_classical():
    g, w = build_classical([1.0, 0.5] + [1.0] * 10, 5)
    assert g.n_vertices == 6 and list(g.level) == [0, 1, 2, 3, 4, 5]
    assert w.fiber_norm_sq[0] == 1.0 and w.fiber_norm_sq[1] == 0.25
    with pytest.raises(InvalidArgument):
        build_classical([], 5)


@st.composite
def phi_graphs(draw):
    n_roots = draw(st.integers(1, 2))
    parent = [-1] * n_roots
    level = [0] * n_roots
    frontier = list(range(n_roots))
    for _ in range(draw(st.integers(1, 4))):
        nxt = []
        for v in frontier:
            for _ in range(draw(st.integers(1, 3))):
                parent.append(v)
                level.append(level[v] + 1)
                nxt.append(len(parent) - 1)
        frontier = nxt
    lam = [np.nan if p < 0 else draw(st.floats(0.25, 2.0)) for p in parent]
    return parent, lam


@settings(max_examples=40, deadline=None)
@given(phi_graphs())
def test_children_invert_parent(data):
    parent, lam = data
    g, w = build_phi_graph(parent, lam)
    for v in range(g.n_vertices):
        for c in g.children(v):
            assert g.parent[c] == v
        p = g.parent[v]
        if p >= 0 and p != v:
            assert g.level[v] == g.level[p] + 1
            assert v in g.children(p)
    assert sum(len(g.children(v)) for v in range(g.n_vertices)) == int(np.sum(g.parent >= 0))
