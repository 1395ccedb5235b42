"""Homology of complexes with complete 1-skeleton.

All computations run on ``I_n[X, K]`` with X the complement of the star tree at
vertex 1. Cycles of K_n project isomorphically onto the chains supported on X,
so this matrix has the same rank as the full boundary over every field, and
its cokernel over Z is H_1(K, Z).

Before any dense elimination, rows and columns with a single nonzero entry are
peeled off. Every entry of a boundary matrix is a unit, so each peel removes
one pivot (rank +1, invariant factor 1) and leaves the rest untouched.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .complex import BOUNDARY_SIGNS, Complex2, full_boundary, num_edges, star_reduced_rows
from .linalg import BitMatrix, SnfResult, det_exact, gf2_rank, is_prime, snf
from .errors import CapacityError

INFINITE = math.inf

# dense F_p / Z cores above this many entries are refused
DENSE_CORE_LIMIT = 40_000_000


@dataclass(frozen=True)
class PeeledBoundary:
    """Result of peeling ``I_n[X, K]``.

    ``entries`` holds (core row, core column, sign) of the surviving nonzeros;
    ``nrows`` is |X|.
    """

    nrows: int
    pivots: int
    core_shape: tuple[int, int]
    entries: tuple[np.ndarray, np.ndarray, np.ndarray]
    zero_rows: int = 0
    zero_cols: int = 0

    def dense(self) -> np.ndarray:
        r, c = self.core_shape
        if r * c > DENSE_CORE_LIMIT:
            raise CapacityError(f"dense core {r}x{c} exceeds {DENSE_CORE_LIMIT} entries")
        out = np.zeros((r, c), dtype=np.int64)
        rr, cc, ss = self.entries
        out[rr, cc] = ss
        return out

    def bits(self) -> BitMatrix:
        # rows of the bit matrix are the core columns (triangles)
        rr, cc, _ = self.entries
        return BitMatrix.from_supports(self.core_shape[1], self.core_shape[0], cc, rr)


def reduced_entries(K: Complex2):
    """Coordinates of ``I_n[X, K]``: (row in X-numbering, column in K, sign)."""
    pos = star_reduced_rows(K.n)
    rows = full_boundary(K.n).col_rows[K.columns]
    r = pos[rows]
    cols = np.repeat(np.arange(len(K)), 3).reshape(-1, 3)
    signs = np.broadcast_to(BOUNDARY_SIGNS, r.shape)
    keep = r >= 0
    return r[keep], cols[keep], signs[keep]


def peel(K: Complex2) -> PeeledBoundary:
    n = K.n
    nrows = num_edges(n) - (n - 1)
    ncols = len(K)
    r, c, s = reduced_entries(K)
    col_rows: list[list[int]] = [[] for _ in range(ncols)]
    row_cols: list[list[int]] = [[] for _ in range(nrows)]
    for ri, ci in zip(r.tolist(), c.tolist()):
        col_rows[ci].append(ri)
        row_cols[ri].append(ci)
    col_alive = np.ones(ncols, dtype=bool)
    row_alive = np.ones(nrows, dtype=bool)
    col_w = np.array([len(x) for x in col_rows], dtype=np.int64)
    row_w = np.array([len(x) for x in row_cols], dtype=np.int64)

    queue = deque([("c", j) for j in range(ncols) if col_w[j] == 1])
    queue.extend(("r", i) for i in range(nrows) if row_w[i] == 1)
    pivots = 0

    def kill_row(i):
        row_alive[i] = False
        for j in row_cols[i]:
            if col_alive[j]:
                col_w[j] -= 1
                if col_w[j] == 1:
                    queue.append(("c", j))

    def kill_col(j):
        col_alive[j] = False
        for i in col_rows[j]:
            if row_alive[i]:
                row_w[i] -= 1
                if row_w[i] == 1:
                    queue.append(("r", i))

    while queue:
        kind, k = queue.popleft()
        if kind == "c":
            if not col_alive[k] or col_w[k] != 1:
                continue
            i = next(i for i in col_rows[k] if row_alive[i])
            col_alive[k] = False
            kill_row(i)
        else:
            if not row_alive[k] or row_w[k] != 1:
                continue
            j = next(j for j in row_cols[k] if col_alive[j])
            row_alive[k] = False
            kill_col(j)
        pivots += 1

    # empty rows/columns leave the core; they are counted, not eliminated
    zero_cols = int((col_alive & (col_w == 0)).sum())
    zero_rows = int((row_alive & (row_w == 0)).sum())
    col_alive &= col_w > 0
    keep_r = row_alive & (row_w > 0)
    new_r = np.cumsum(keep_r) - 1
    new_c = np.cumsum(col_alive) - 1
    mask = keep_r[r] & col_alive[c]
    entries = (new_r[r[mask]], new_c[c[mask]], s[mask].astype(np.int64))
    shape = (int(keep_r.sum()), int(col_alive.sum()))
    return PeeledBoundary(nrows, pivots, shape, entries, zero_rows, zero_cols)


def boundary_rank_f2(K: Complex2) -> int:
    P = peel(K)
    return P.pivots + gf2_rank(P.bits())


def boundary_rank_fp(K: Complex2, p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return boundary_rank_f2(K)
    P = peel(K)
    if 0 in P.core_shape:
        return P.pivots
    A = np.ascontiguousarray(P.dense() % p)
    return P.pivots + int(_kernels.modp_rank_inplace(A, p))


def cycle_rank(n: int) -> int:
    """dim Z_1 of the complete graph on n vertices."""
    return num_edges(n) - (n - 1)


def h1_f2_dim(K: Complex2) -> int:
    return cycle_rank(K.n) - boundary_rank_f2(K)


def h1_fp_dim(K: Complex2, p: int) -> int:
    return cycle_rank(K.n) - boundary_rank_fp(K, p)


def h1_integral(K: Complex2) -> SnfResult:
    """Smith form of ``I_n[X, K]``; its cokernel is H_1(K, Z)."""
    P = peel(K)
    core = snf(P.dense()) if all(P.core_shape) else SnfResult((), 0)
    factors = (1,) * P.pivots + core.factors
    return SnfResult(factors, len(factors), P.nrows, len(K))


def h1_order(K: Complex2):
    """|H_1(K, Z)| via the Smith form, or INFINITE."""
    s = h1_integral(K)
    return INFINITE if s.free_rank else s.torsion_order


def h1_torsion_order(K: Complex2):
    """``|det I_n[X, K(2)]|``: |H_1(K, Z)| for a hypertree, INFINITE otherwise."""
    n = K.n
    r = cycle_rank(n)
    if len(K) != r:
        raise ValueError(f"need exactly C(n-1,2) = {r} triangles, got {len(K)}")
    P = peel(K)
    if P.zero_rows or P.zero_cols or P.core_shape[0] != P.core_shape[1]:
        return INFINITE
    d = abs(det_exact(P.dense())) if P.core_shape[0] else 1
    return d if d else INFINITE


def is_hypertree(K: Complex2) -> bool:
    return len(K) == cycle_rank(K.n) and h1_torsion_order(K) != INFINITE
