from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlab.complex import (
    Complex2,
    boundary_submatrix,
    coboundary_mask,
    cut_edges,
    edge_array,
    edge_index,
    format_complex,
    format_graph,
    full_boundary,
    graph_coboundary,
    num_edges,
    num_triangles,
    parse_complex,
    parse_graph,
    star_tree,
    t_counts,
    tree_complement,
    triangle_array,
    triangle_index,
    vertex_boundary,
)
from hyperlab.errors import FormatError, InvalidDimensionError


@pytest.mark.parametrize("n", range(3, 9))
def test_index_formulas_match_lexicographic_order(n):
    E = list(itertools.combinations(range(1, n + 1), 2))
    T = list(itertools.combinations(range(1, n + 1), 3))
    assert [tuple(e) for e in edge_array(n).tolist()] == E
    assert [tuple(t) for t in triangle_array(n).tolist()] == T
    for k, (a, b) in enumerate(E):
        assert edge_index(n, a, b) == k
    for k, (a, b, c) in enumerate(T):
        assert triangle_index(n, a, b, c) == k


def test_full_boundary_n3_signs():
    M = full_boundary(3).toarray()
    # rows 12, 13, 23
    assert M.shape == (3, 1)
    assert M[:, 0].tolist() == [1, -1, 1]


def test_full_boundary_n4_shape_and_mod2_sum():
    M = full_boundary(4).toarray()
    assert M.shape == (6, 4)
    assert (np.count_nonzero(M, axis=0) == 3).all()
    assert not (M.sum(axis=1) % 2).any()


def test_small_n_rejected():
    with pytest.raises(InvalidDimensionError):
        full_boundary(2)
    with pytest.raises(ValueError):
        Complex2(2, ())


@pytest.mark.parametrize("n", range(3, 9))
def test_boundary_of_boundary_vanishes(n):
    assert not np.any(vertex_boundary(n) @ full_boundary(n).toarray())


def test_boundary_submatrix_examples():
    M = full_boundary(4)
    assert np.array_equal(boundary_submatrix(M, edge_array(4).tolist(), triangle_array(4).tolist()), M.toarray())
    B = boundary_submatrix(M, [(2, 3), (2, 4), (3, 4)], [(1, 2, 3), (1, 2, 4), (1, 3, 4)])
    assert B.tolist() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert boundary_submatrix(M, [], [(1, 2, 3)]).shape == (0, 1)
    with pytest.raises(IndexError):
        boundary_submatrix(M, [(1, 5)], [(1, 2, 3)])


def test_graph_coboundary_examples():
    assert graph_coboundary(4, []) == frozenset()
    assert graph_coboundary(4, [(1, 2)]) == {(1, 2, 3), (1, 2, 4)}
    assert graph_coboundary(4, [(1, 2), (1, 3), (2, 3)]) == set(itertools.combinations(range(1, 5), 3))


def test_t_counts_examples():
    assert set(t_counts(5, triangle_array(5).tolist()).values()) == {3}
    tc = t_counts(4, [(1, 2, 3)])
    assert tc == {(1, 2): 1, (1, 3): 1, (2, 3): 1, (1, 4): 0, (2, 4): 0, (3, 4): 0}
    tc = t_counts(4, [(1, 2, 3), (1, 2, 4), (1, 3, 4)])
    assert [tc[e] for e in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]] == [2, 2, 2, 1, 1, 1]


def test_star_tree():
    assert star_tree(3) == [(1, 2), (1, 3)]
    assert tree_complement(3) == [(2, 3)]
    assert len(tree_complement(4)) == 3
    assert len(tree_complement(5)) == 6


def _brute_coboundary(n, G):
    G = set(G)
    return {t for t in itertools.combinations(range(1, n + 1), 3)
            if sum(e in G for e in itertools.combinations(t, 2)) % 2}


@pytest.mark.parametrize("n", range(3, 7))
def test_parity_duality(n):
    rng = np.random.default_rng(n)
    M = full_boundary(n)
    for _ in range(100):
        g = rng.random(num_edges(n)) < 0.5
        G = [tuple(e) for e in edge_array(n)[g].tolist()]
        assert graph_coboundary(n, G) == _brute_coboundary(n, G)
        odd = (g[M.col_rows].sum(axis=1) % 2).astype(bool)
        assert np.array_equal(odd, coboundary_mask(n, G))


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 9).flatmap(lambda n: st.tuples(st.just(n), st.lists(
    st.tuples(*(st.integers(1, n),) * 3).filter(lambda t: len(set(t)) == 3), max_size=40))))
def test_t_count_sum_is_three_times_size(data):
    n, tris = data
    Y = {tuple(sorted(t)) for t in tris}
    assert sum(t_counts(n, Y).values()) == 3 * len(Y)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 9).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.integers(1, n)))))
def test_cuts_are_cocycles(data):
    n, U = data
    assert graph_coboundary(n, cut_edges(n, U)) == frozenset()


def test_complex_file_roundtrip():
    K = Complex2.from_triangles(5, [(3, 4, 5), (1, 2, 3), (2, 1, 4)])
    text = format_complex(K)
    assert text.splitlines()[0] == "5 3"
    assert parse_complex(text) == K


@pytest.mark.parametrize("bad", [
    "4 2\n1 2 3\n1 2 3\n",          # duplicate
    "4 2\n1 2 4\n1 2 3\n",          # unsorted lines
    "4 1\n2 1 3\n",                 # unsorted triple
    "4 1\n1 2 5\n",                 # out of range
    "4 2\n1 2 3\n",                 # wrong count
    "4\n1 2 3\n",                   # bad header
])
def test_complex_file_rejects(bad):
    with pytest.raises(FormatError):
        parse_complex(bad)


def test_graph_file_roundtrip():
    text = format_graph(5, [(2, 3), (1, 4)])
    assert parse_graph(text) == (5, [(1, 4), (2, 3)])
    with pytest.raises(FormatError):
        parse_graph("4 1\n3 2\n")


def test_complex_value_semantics():
    K = Complex2.from_indices(5, [3, 1, 1])
    assert len(K) == 2 and K.columns.tolist() == [1, 3]
    assert tuple(triangle_array(5)[1]) in K
    assert hash(K) == hash(Complex2.from_triangles(5, K.triangles))
    assert num_triangles(5) == 10
