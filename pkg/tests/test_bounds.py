from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from hyperlab import bounds as b
from hyperlab.complex import (
    Complex2,
    all_graphs,
    coboundary_mask,
    cut_edges,
    edge_array,
    graph_from_mask,
    is_cocycle,
    num_edges,
    num_triangles,
    triangle_array,
)
from hyperlab.graphon import f_functional, graphon_of_graph
from hyperlab.samplers import enumerate_hypertrees, exact_measure

LOG2 = math.log(2)
ALL4 = triangle_array(4).tolist()


def complete(n):
    return list(combinations(range(1, n + 1), 2))


def test_prob_subcomplex_examples():
    assert b.prob_subcomplex_exact(5, triangle_array(5).tolist()) == 1
    assert b.prob_subcomplex_exact(4, [(1, 2, 3), (1, 2, 4), (1, 3, 4)]) == Fraction(1, 4)
    assert b.prob_subcomplex_exact(4, [(1, 2, 3), (1, 2, 4)]) == 0


@pytest.mark.parametrize("n", [4, 5])
def test_prob_subcomplex_of_hypertree_is_its_mass(n):
    for K, mass in exact_measure(n).items():
        assert b.prob_subcomplex_exact(n, K) == mass


def test_prob_subcomplex_against_enumeration_n5():
    rng = np.random.default_rng(30)
    H = enumerate_hypertrees(5)
    for _ in range(100):
        mask = rng.random(10) < rng.uniform(0.4, 1.0)
        Y = set(np.flatnonzero(mask).tolist())
        want = sum(Fraction(h * h, 125) for K, h in H if set(K.columns.tolist()) <= Y)
        assert b.prob_subcomplex_exact(5, mask) == want


def test_prob_cocycle_examples():
    assert b.prob_cocycle_exact(5, []) == 1
    assert b.prob_cocycle_exact(4, [(1, 2)]) == 0
    assert b.prob_cocycle_exact(4, [(1, 2), (1, 3), (1, 4)]) == 1


def test_upperb_examples():
    Y = [(1, 2, 3), (1, 2, 4), (1, 3, 4)]
    assert b.upperb_bound(4, Y) == pytest.approx(-0.5 * LOG2)
    assert math.log(0.25) <= b.upperb_bound(4, Y)
    for n in (4, 5, 6):
        want = (n - 2) * math.log(n) + math.comb(n, 2) * (1 - 2 / n) * math.log((n - 2) / n)
        assert b.upperb_bound(n, triangle_array(n).tolist()) == pytest.approx(want)
        assert b.certified_le(Fraction(1), b.upperb_bound(n, triangle_array(n).tolist()))
    assert b.upperb_bound(4, [(1, 2, 3)]) == -math.inf


@pytest.mark.parametrize("n", [4, 5])
def test_upperb_sound_on_all_coboundary_complements(n):
    for G in all_graphs(n):
        Y = ~coboundary_mask(n, G)
        q, ub = b.prob_subcomplex_exact(n, Y), b.upperb_bound(n, Y)
        assert b.certified_le(q, ub)
        if ub == -math.inf:
            assert q == 0


def test_discrete_f_examples():
    assert b.discrete_f(4, []) == 0
    want = (-2 * LOG2 + 8 * math.log(0.75)) / 16
    assert b.discrete_f(4, [(1, 2)]) == pytest.approx(want, abs=1e-15)
    assert b.discrete_f(4, [(1, 2)]) == pytest.approx(-0.2304844337958836, abs=1e-15)
    # complete graph stays finite: the empty diagonal blocks keep B away from 0
    val = b.discrete_f(5, complete(5))
    assert val == pytest.approx(-0.7330326, abs=1e-7)
    assert val == pytest.approx(f_functional(graphon_of_graph(complete(5), 5)), abs=1e-12)


def test_discrete_f_complete_graph_closed_form():
    # A = J - I gives B = 2 off the diagonal and 0 on it
    for n in (4, 5, 9):
        want = n * (n - 1) * math.log(2 / n) / n**2
        assert b.discrete_f(n, complete(n)) == pytest.approx(want, abs=1e-14)


def test_discrete_identity():
    rng = np.random.default_rng(31)
    for _ in range(500):
        n = int(rng.integers(1, 41))
        G = [tuple(e) for e in edge_array(n)[rng.random(n * (n - 1) // 2) < rng.random()].tolist()] if n > 1 else []
        assert abs(b.discrete_f(n, G) - f_functional(graphon_of_graph(G, n))) <= 1e-9


def test_upperbf_examples():
    for n in (4, 6):
        assert b.upperbf_bound(n, []) == pytest.approx((n - 2) * math.log(n))
    n = 5
    assert b.certified_le(b.prob_cocycle_exact(n, complete(n)), b.upperbf_bound(n, complete(n)))
    assert b.prob_cocycle_exact(n, complete(n)) == 0


def test_upperbf_exhaustive_n5():
    for G in all_graphs(5):
        assert b.certified_le(b.prob_cocycle_exact(5, G), b.upperbf_bound(5, G))


def test_one_out_prob_examples():
    assert b.one_out_cocycle_prob(6, []) == 1
    assert b.one_out_cocycle_prob(6, cut_edges(6, [1, 4])) == 1
    assert b.one_out_cocycle_prob(5, [(1, 2), (1, 3), (2, 3)]) == 0
    with pytest.raises(ValueError):
        b.one_out_cocycle_prob(3, [])


def test_one_out_prob_brute_force_n4():
    # enumerate all 2^6 third-vertex choices at n=4
    E = edge_array(4).tolist()
    for mask in (0b1, 0b11, 0b101, 0b111000, 0b10110):
        G = graph_from_mask(4, mask)
        hits = 0
        for choice in range(1 << 6):
            tris = []
            for k, (a, c) in enumerate(E):
                others = [v for v in range(1, 5) if v not in (a, c)]
                tris.append(tuple(sorted((a, c, others[choice >> k & 1]))))
            hits += is_cocycle(Complex2.from_triangles(4, tris), G)
        assert b.one_out_cocycle_prob(4, G) == Fraction(hits, 64)


def test_one_out_bound():
    for n in (4, 7):
        assert b.one_out_bound(n, []) == pytest.approx(n * (n - 1) / (n - 2))
    rng = np.random.default_rng(32)
    for _ in range(200):
        G = graph_from_mask(6, int(rng.integers(0, 1 << 15)))
        assert b.certified_le(b.one_out_cocycle_prob(6, G), b.one_out_bound(6, G), slack=1e-9)
    assert b.one_out_cocycle_prob(6, complete(6)) == 0


def test_cocycle_count():
    assert b.cocycle_count(Complex2.from_triangles(4, ALL4)) == 8
    assert b.cocycle_count(Complex2(6, ())) == 2 ** 15
    rng = np.random.default_rng(33)
    for _ in range(20):
        K = Complex2.from_indices(5, np.flatnonzero(rng.random(10) < 0.5))
        assert b.cocycle_count(K) == sum(is_cocycle(K, G) for G in all_graphs(5))


def test_cocycle_count_is_exact_big_int():
    K = Complex2(60, ())
    assert b.cocycle_count(K) == 1 << num_edges(60)


def test_cohen_lenstra():
    assert b.cohen_lenstra_pmf(2, 0, 64) == pytest.approx(0.2887880951, abs=1e-8)
    assert b.cohen_lenstra_pmf(2, 1, 64) == pytest.approx(0.5775762, abs=1e-6)
    assert abs(sum(b.cohen_lenstra_pmf(2, r, 64) for r in range(11)) - 1) < 1e-6
    with pytest.raises(ValueError):
        b.cohen_lenstra_pmf(4, 0)
    with pytest.raises(ValueError):
        b.cohen_lenstra_pmf(2, 0, 10)


def test_certified_comparison_rounds_against_the_claim():
    q = Fraction(1, 3)
    x = math.log(1 / 3)
    assert b.log_upper(q) >= x
    assert not b.certified_le(q, math.nextafter(x, -math.inf))
    assert b.certified_le(q, x + 1e-12)
    assert b.certified_le(Fraction(0), -math.inf)
    assert not b.certified_le(Fraction(1, 2), -math.inf)


def test_subcomplex_mask_and_list_agree():
    rng = np.random.default_rng(34)
    mask = rng.random(num_triangles(6)) < 0.7
    assert b.prob_subcomplex_exact(6, mask) == b.prob_subcomplex_exact(6, triangle_array(6)[mask].tolist())


def test_expected_cocycle_count_n6_exact():
    # linearity: sum over graphs of P(G in Z1) equals E|Z1| under the enumerated measure
    lhs = sum(b.prob_cocycle_exact(6, G) for G in all_graphs(6))
    rhs = sum(mass * b.cocycle_count(K) for K, mass in exact_measure(6).items())
    assert lhs == rhs
    assert rhs > 32  # the projective planes push it above the cut count
