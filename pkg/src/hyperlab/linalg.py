"""Exact linear algebra: bit-packed GF(2) matrices, integer determinants, Smith form."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt, prod

import numpy as np

from . import _kernels
from .errors import InfiniteHomologyError

WORD = 64


# ---------------------------------------------------------------------------
# GF(2)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BitMatrix:
    """Dense matrix over F_2, rows packed little-endian into uint64 words.

    Bit ``c`` of row ``r`` lives in ``words[r, c // 64]`` at position ``c % 64``.
    Padding bits beyond ``cols`` are always zero.
    """

    rows: int
    cols: int
    words: np.ndarray

    def __post_init__(self):
        if self.words.shape != (self.rows, nwords(self.cols)) or self.words.dtype != np.uint64:
            raise ValueError("payload shape/dtype does not match dimensions")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, nwords(cols)), dtype=np.uint64))

    @classmethod
    def from_dense(cls, A) -> "BitMatrix":
        A = np.asarray(A)
        if A.ndim != 2:
            raise ValueError("expected a 2-d array")
        rows, cols = A.shape
        nw = nwords(cols)
        bits = np.zeros((rows, nw * WORD), dtype=np.uint8)
        bits[:, :cols] = (A.astype(np.int64) & 1).astype(np.uint8)
        packed = np.packbits(bits, axis=1, bitorder="little")
        words = np.ascontiguousarray(packed).view("<u8").astype(np.uint64).reshape(rows, nw)
        return cls(rows, cols, words)

    @classmethod
    def from_supports(cls, rows: int, cols: int, r_idx, c_idx) -> "BitMatrix":
        """Build from coordinate lists; repeated coordinates cancel mod 2."""
        r_idx = np.asarray(r_idx, dtype=np.int64)
        c_idx = np.asarray(c_idx, dtype=np.int64)
        words = np.zeros((rows, nwords(cols)), dtype=np.uint64)
        vals = np.left_shift(np.uint64(1), (c_idx & 63).astype(np.uint64))
        np.bitwise_xor.at(words, (r_idx, c_idx >> 6), vals)
        return cls(rows, cols, words)

    def to_dense(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        b = np.unpackbits(self.words.astype("<u8").view(np.uint8), axis=1, bitorder="little")
        return b[:, : self.cols].copy()

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)


def nwords(cols: int) -> int:
    return (cols + WORD - 1) // WORD


def gf2_rank(M: BitMatrix) -> int:
    """Rank over F_2. Eliminates on a private copy."""
    if M.rows == 0 or M.cols == 0:
        return 0
    W = np.array(M.words, dtype=np.uint64, copy=True, order="C")
    return int(_kernels.gf2_rank_inplace(W, M.cols))


def gf2_kernel(M: BitMatrix) -> BitMatrix:
    """Basis of ``{x : M x = 0}`` over F_2, one basis vector per row."""
    A = M.to_dense().astype(np.uint8)
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        others = np.flatnonzero(A[:, c])
        others = others[others != r]
        A[others] ^= A[r]
        pivots.append(c)
        r += 1
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = A[i, f]
    return BitMatrix.from_dense(basis)


def rank_mod_p(A, p: int) -> int:
    """Rank of an integer matrix over F_p (dense)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return 0
    if p == 2:
        return gf2_rank(BitMatrix.from_dense(A))
    W = np.ascontiguousarray(A % p, dtype=np.int64)
    return int(_kernels.modp_rank_inplace(W, p))


def is_prime(p) -> bool:
    if int(p) != p or p < 2:
        return False
    p = int(p)
    return all(p % q for q in range(2, isqrt(p) + 1))


# ---------------------------------------------------------------------------
# determinants over Z
# ---------------------------------------------------------------------------

def _as_int_rows(M) -> list[list[int]]:
    if isinstance(M, np.ndarray):
        if M.ndim != 2:
            raise ValueError("expected a 2-d matrix")
        return [[int(x) for x in row] for row in M.tolist()]
    return [[int(x) for x in row] for row in M]


def bareiss_det(M) -> int:
    """Exact determinant by fraction-free elimination (Python integers)."""
    A = _as_int_rows(M)
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("bareiss_det needs a square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for i in range(n - 1):
        if A[i][i] == 0:
            for r in range(i + 1, n):
                if A[r][i] != 0:
                    A[i], A[r] = A[r], A[i]
                    sign = -sign
                    break
            else:
                return 0
        piv = A[i][i]
        rowi = A[i]
        for r in range(i + 1, n):
            rowr = A[r]
            f = rowr[i]
            for c in range(i + 1, n):
                rowr[c] = (rowr[c] * piv - f * rowi[c]) // prev
        prev = piv
    return sign * A[n - 1][n - 1]


def hadamard_bound(M) -> float:
    A = np.asarray(M, dtype=np.float64)
    if A.size == 0:
        return 1.0
    return float(min(np.prod(np.linalg.norm(A, axis=0)), np.prod(np.linalg.norm(A, axis=1))))


# Bareiss intermediates are minors, each step forms a product of two of them.
_INT64_SAFE = float(2**62)


def det_exact(M) -> int:
    """Exact determinant, using the int64 kernel when overflow is impossible."""
    A = np.asarray(M)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("det_exact needs a square matrix")
    if A.shape[0] == 0:
        return 1
    if A.dtype.kind in "iu" and hadamard_bound(A) ** 2 < _INT64_SAFE:
        return int(_kernels.bareiss_det_batch(np.ascontiguousarray(A, dtype=np.int64)[None])[0])
    return bareiss_det(A)


def gram_det(A) -> int:
    """``det(A @ A.T)`` exactly."""
    rows = _as_int_rows(A)
    k = len(rows)
    G = [[sum(x * y for x, y in zip(rows[i], rows[j])) for j in range(k)] for i in range(k)]
    return bareiss_det(G)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SnfResult:
    """Nonzero invariant factors ``d_1 | d_2 | ... | d_r`` of a matrix.

    ``rows``/``cols`` record the matrix shape; the cokernel of an ``rows x cols``
    matrix is ``Z^(rows - rank) + sum Z/d_i``.
    """

    factors: tuple[int, ...]
    rank: int
    rows: int | None = None
    cols: int | None = None

    @property
    def free_rank(self) -> int:
        return 0 if self.rows is None else self.rows - self.rank

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.factors if d != 1)

    @property
    def torsion_order(self) -> int:
        return prod(self.factors)


def snf(M) -> SnfResult:
    """Invariant factors by gcd-driven diagonal reduction.

    Pivots on the smallest nonzero entry of the trailing block; after the
    pivot row and column are cleared, any entry not divisible by the pivot is
    folded into the pivot row and the step repeats.
    """
    A = _as_int_rows(M)
    rows = len(A)
    cols = len(A[0]) if rows else (np.asarray(M).shape[1] if isinstance(M, np.ndarray) else 0)
    factors: list[int] = []
    t = 0
    while t < rows and t < cols:
        best = None
        for i in range(t, rows):
            row = A[i]
            for j in range(t, cols):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        A[t], A[i] = A[i], A[t]
        if j != t:
            for row in A:
                row[t], row[j] = row[j], row[t]
        while True:
            piv = A[t][t]
            moved = False
            for i in range(t + 1, rows):
                v = A[i][t]
                if v:
                    q = v // piv
                    ri, rt = A[i], A[t]
                    for c in range(t, cols):
                        ri[c] -= q * rt[c]
                    if ri[t]:
                        A[t], A[i] = A[i], A[t]
                        moved = True
                        break
            if moved:
                continue
            rt = A[t]
            for j in range(t + 1, cols):
                v = rt[j]
                if v:
                    q = v // piv
                    for row in A[t:]:
                        row[j] -= q * row[t]
                    if rt[j]:
                        for row in A:
                            row[t], row[j] = row[j], row[t]
                        moved = True
                        break
            if moved:
                continue
            if abs(piv) != 1:
                bad = next((i for i in range(t + 1, rows)
                            if any(A[i][c] % piv for c in range(t + 1, cols))), None)
                if bad is not None:
                    rb, rt = A[bad], A[t]
                    for c in range(t, cols):
                        rt[c] += rb[c]
                    continue
            break
        factors.append(abs(A[t][t]))
        t += 1
    return SnfResult(tuple(factors), len(factors), rows, cols)


def snf_minor_gcds(M) -> list[int]:
    """Determinantal divisors d_k = gcd of all k x k minors (brute force).

    Invariant factors are ``d_k / d_{k-1}``. Only for tiny matrices.
    """
    from itertools import combinations

    A = np.asarray(M, dtype=np.int64)
    r, c = A.shape
    out = []
    for k in range(1, min(r, c) + 1):
        g = 0
        for rs in combinations(range(r), k):
            for cs in combinations(range(c), k):
                g = gcd(g, bareiss_det(A[np.ix_(rs, cs)]))
        if g == 0:
            break
        out.append(g)
    return out


def p_torsion_dim(s: SnfResult, p: int, strict: bool = True) -> int:
    """Number of invariant factors divisible by ``p``.

    With ``strict`` (the default) a cokernel with a free part is rejected.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if strict and s.free_rank > 0:
        raise InfiniteHomologyError("zero invariant factor: homology is infinite")
    if any(d == 0 for d in s.factors):
        raise InfiniteHomologyError("zero invariant factor: homology is infinite")
    return sum(1 for d in s.factors if d % p == 0)
