"""Exact cocycle/subcomplex probabilities and the upper bounds they satisfy.

Probabilities under the determinantal measure are exact :class:`Fraction`
values; bounds are floats in natural-log scale, with ``-inf`` for probability 0.
"""
from __future__ import annotations

import math
from fractions import Fraction
from math import comb

import numpy as np
from scipy.special import xlogy

from .complex import (
    Complex2,
    check_n,
    coboundary_mask,
    num_edges,
    reduced_boundary,
    t_count_array,
    triangle_index,
)
from .graphon import adjacency, f_functional, graphon_of_graph
from .homology import boundary_rank_f2, cycle_rank
from .linalg import gram_det, is_prime

NEG_INF = -math.inf


def _triangle_mask(n: int, Y) -> np.ndarray:
    if isinstance(Y, np.ndarray) and Y.dtype == bool:
        return Y
    mask = np.zeros(comb(n, 3), dtype=bool)
    cols = Y.columns if isinstance(Y, Complex2) else None
    if cols is None:
        tris = [tuple(t) for t in Y]
        if tris:
            t = np.array(tris, dtype=np.int64)
            if np.any(t.min(axis=1) < 1) or np.any(t.max(axis=1) > n) or np.any(np.diff(t, axis=1) <= 0):
                raise IndexError("triangles must be sorted triples in [1, n]")
            cols = np.atleast_1d(triangle_index(n, t[:, 0], t[:, 1], t[:, 2]))
        else:
            cols = np.zeros(0, dtype=np.int64)
    mask[cols] = True
    return mask


def normalizer(n: int) -> int:
    """``n^C(n-2,2)``, the total weight sum of all hypertrees."""
    return n ** comb(n - 2, 2)


def prob_subcomplex_exact(n: int, Y) -> Fraction:
    """``P(T_n(2) is a subset of Y) = det(I_n[X,Y] I_n[X,Y]^T) / n^C(n-2,2)``."""
    check_n(n)
    mask = _triangle_mask(n, Y)
    if mask.sum() < cycle_rank(n):
        return Fraction(0)
    A = reduced_boundary(n)[:, mask]
    return Fraction(gram_det(A), normalizer(n))


def prob_cocycle_exact(n: int, G) -> Fraction:
    """``P(G is a mod-2 cocycle of T_n)``: no triangle of ``T_n`` in the coboundary of ``G``."""
    return prob_subcomplex_exact(n, ~coboundary_mask(n, G))


def upperb_bound(n: int, Y) -> float:
    """``(n-2) log n + (1 - 2/n) sum_tau log(t_Y(tau)/n)``, ``-inf`` if some count is 0."""
    check_n(n)
    t = t_count_array(n, _triangle_mask(n, Y))
    if np.any(t == 0):
        return NEG_INF
    return (n - 2) * math.log(n) + (1 - 2 / n) * float(np.log(t / n).sum())


def symmetric_b(n: int, G) -> np.ndarray:
    """``B = A(J-A) + (J-A)A``: per pair, how many w see exactly one G-edge towards u, v."""
    A = adjacency(G, n)
    C = 1 - A
    return A @ C + C @ A


def discrete_f(n: int, G) -> float:
    """``(1/n^2) sum_{u,v} [A log(B/n) + (1-A) log(1 - B/n)]`` with ``0 log 0 = 0``."""
    check_n(n, 1)
    A = adjacency(G, n).astype(np.float64)
    B = symmetric_b(n, G).astype(np.float64)
    with np.errstate(divide="ignore"):
        terms = xlogy(A, B / n) + xlogy(1 - A, 1 - B / n)
    return float(terms.sum() / (n * n))


def upperbf_bound(n: int, G) -> float:
    check_n(n)
    f = f_functional(graphon_of_graph(G, n))
    if f == NEG_INF:
        return NEG_INF
    return (n - 2) * math.log(n) + (n * n / 2) * (1 - 2 / n) * f


def one_out_cocycle_prob(n: int, G) -> Fraction:
    """``prod_tau t_Y(tau) / (n-2)`` with Y the complement of the coboundary of G."""
    check_n(n, 4)
    t = t_count_array(n, ~coboundary_mask(n, G))
    num = math.prod(int(x) for x in t)
    return Fraction(num, (n - 2) ** num_edges(n))


def one_out_bound(n: int, G) -> float:
    check_n(n, 4)
    f = f_functional(graphon_of_graph(G, n))
    if f == NEG_INF:
        return NEG_INF
    return n * (n - 1) / (n - 2) + (n * n / 2) * f


def cocycle_count(K: Complex2) -> int:
    """``|Z^1(K, F_2)| = 2^(C(n,2) - rank_F2 boundary)``, as an exact integer."""
    return 1 << (num_edges(K.n) - boundary_rank_f2(K))


def cohen_lenstra_pmf(p: int, r: int, jmax: int = 64) -> float:
    """``p^(-r^2) prod_{j<=r} (1-p^-j)^-2 prod_{j<=jmax} (1-p^-j)``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if r < 0:
        raise ValueError("r must be nonnegative")
    if jmax < 32:
        raise ValueError("jmax must be at least 32")
    tail = math.prod(1.0 - p ** -j for j in range(1, jmax + 1))
    head = math.prod((1.0 - p ** -j) ** -2 for j in range(1, r + 1))
    return p ** -(r * r) * head * tail


# ---------------------------------------------------------------------------
# exact-vs-float comparisons
# ---------------------------------------------------------------------------

def _float_up(q: Fraction) -> float:
    f = float(q)
    if Fraction(f) < q:
        f = math.nextafter(f, math.inf)
    return f


def log_upper(q: Fraction) -> float:
    """An upper bound on ``log(q)`` (``-inf`` for 0)."""
    if q <= 0:
        return NEG_INF
    v = math.log(_float_up(q))
    # math.log is faithfully rounded; two ulps cover it
    return math.nextafter(math.nextafter(v, math.inf), math.inf)


def certified_le(q: Fraction, bound: float, slack: float = 0.0) -> bool:
    """True when ``log(q) <= bound + slack`` holds even with ``log(q)`` rounded up."""
    if q == 0:
        return True
    if bound == NEG_INF:
        return False
    return log_upper(q) <= bound + slack
