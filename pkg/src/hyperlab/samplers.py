"""Random 2-complexes: determinantal hypertrees, 1-out complexes, Linial-Meshulam.

The determinantal hypertree measure gives a hypertree ``S`` the probability
``|H_1(S, Z)|^2 / n^C(n-2,2)``. It is the projection determinantal process on
triangles whose kernel projects onto the row space of ``I_n[X, :]``, so it is
sampled with the sequential (chain rule) algorithm: repeatedly pick a triangle
with probability proportional to its squared residual norm, then project all
residuals orthogonally to the picked one.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from . import _kernels
from .complex import (
    BOUNDARY_SIGNS,
    Complex2,
    check_n,
    edge_array,
    full_boundary,
    num_triangles,
    reduced_boundary,
    triangle_index,
    _row_positions,
    tree_complement,
)
from .errors import CapacityError, NumericalFailure

ENUMERATION_MAX_N = 6
_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# randomness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RngState:
    """Master seed plus trial index; each trial owns an independent Philox stream.

    The stream is keyed by ``(seed, trial)`` so a trial draws the same numbers no
    matter which worker runs it or in which order.
    """

    seed: int
    trial: int = 0

    def generator(self) -> np.random.Generator:
        key = ((self.seed & _MASK64) << 64) | (self.trial & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))

    def derive(self, trial: int) -> "RngState":
        return RngState(self.seed, trial)


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngState):
        return rng.generator()
    return RngState(int(rng)).generator()


# ---------------------------------------------------------------------------
# determinantal hypertrees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectionBasis:
    """``r x N`` matrix with orthonormal rows spanning the row space of ``I_n[X, :]``.

    Column ``j`` is triangle ``j`` in projected coordinates, so the kernel is
    ``K(i, j) = q_i . q_j``.
    """

    n: int
    Q: np.ndarray

    @property
    def r(self) -> int:
        return self.Q.shape[0]

    @property
    def N(self) -> int:
        return self.Q.shape[1]

    def kernel_diagonal(self) -> np.ndarray:
        return np.einsum("ij,ij->j", self.Q, self.Q)

    def kernel(self, i: int, j: int) -> float:
        return float(self.Q[:, i] @ self.Q[:, j])

    def projector(self) -> np.ndarray:
        """Dense ``N x N`` kernel matrix; small n only."""
        return self.Q.T @ self.Q


def _reduced_boundary_float(n: int, tree=None) -> np.ndarray:
    M = full_boundary(n)
    pos = _row_positions(n, tree_complement(n, tree))
    A = np.zeros((comb(n - 1, 2), num_triangles(n)))
    jj = np.arange(num_triangles(n))
    for i in range(3):
        r = pos[M.col_rows[:, i]]
        keep = r >= 0
        A[r[keep], jj[keep]] = BOUNDARY_SIGNS[i]
    return A


def hypertree_projection_basis(n: int, tree=None) -> ProjectionBasis:
    """Orthonormal row basis of ``I_n[X, :]`` (X = complement of ``tree``, default star)."""
    check_n(n)
    if tree is None:
        return _star_basis(n)
    return _build_basis(n, tree)


@lru_cache(maxsize=4)
def _star_basis(n: int) -> ProjectionBasis:
    return _build_basis(n, None)


def _build_basis(n: int, tree) -> ProjectionBasis:
    A = _reduced_boundary_float(n, tree)
    r = A.shape[0]
    q, R = np.linalg.qr(A.T)
    del A
    diag = np.abs(np.diag(R))
    if r and diag.min() < 1e-8 * max(diag.max(), 1.0):
        raise NumericalFailure(f"boundary rows are rank deficient at n={n}")
    Q = np.ascontiguousarray(q.T)
    Q.flags.writeable = False
    return ProjectionBasis(n, Q)


def sample_hypertree(n: int, rng, basis: ProjectionBasis | None = None) -> Complex2:
    """Draw a determinantal hypertree with the sequential projection sampler."""
    check_n(n)
    B = basis if basis is not None else hypertree_projection_basis(n)
    gen = as_generator(rng)
    # spare draws cover the rare resampled steps
    uniforms = gen.random(B.r + 32)
    sel = _kernels.dpp_sample(B.Q, uniforms)
    if sel.size and sel[0] < 0:
        raise NumericalFailure(f"projection sampler lost orthogonality at n={n}")
    return Complex2.from_indices(n, sel)


def sample_hypertree_exact(n: int, rng) -> Complex2:
    """Exact sampler for n <= 6: integer-weighted draw over the enumerated support."""
    trees, cum = _exact_table(n)
    u = int(as_generator(rng).integers(0, cum[-1]))
    lo, hi = 0, len(cum) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if cum[mid] > u:
            hi = mid
        else:
            lo = mid + 1
    return trees[lo]


@lru_cache(maxsize=8)
def _exact_table(n: int):
    trees, acc, cum = [], 0, []
    for K, order in enumerate_hypertrees(n):
        acc += order * order
        trees.append(K)
        cum.append(acc)
    return trees, cum


# ---------------------------------------------------------------------------
# other models
# ---------------------------------------------------------------------------

def sample_one_out(n: int, rng) -> Complex2:
    """Every edge of K_n independently picks a uniform third vertex."""
    check_n(n)
    gen = as_generator(rng)
    E = edge_array(n)
    a, b = E[:, 0], E[:, 1]
    w = gen.integers(1, n - 1, size=len(E))  # uniform on [1, n-2], then skip a and b
    w = w + (w >= a)
    w = w + (w >= b)
    t = np.sort(np.stack([a, b, w], axis=1), axis=1)
    return Complex2.from_indices(n, np.atleast_1d(triangle_index(n, t[:, 0], t[:, 1], t[:, 2])))


def sample_linial_meshulam(n: int, p: float, rng) -> Complex2:
    check_n(n)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    gen = as_generator(rng)
    keep = gen.random(num_triangles(n)) < p
    return Complex2.from_indices(n, np.flatnonzero(keep))


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------

def _check_enumerable(n: int) -> None:
    check_n(n)
    if n > ENUMERATION_MAX_N:
        raise CapacityError(
            f"enumeration is limited to n <= {ENUMERATION_MAX_N}; "
            f"n={n} would need C({num_triangles(n)}, {comb(n - 1, 2)}) determinants"
        )


def enumerate_hypertrees(n: int, chunk: int = 16384) -> list[tuple[Complex2, int]]:
    """Every hypertree on [n] with its |H_1|, found as nonzero ``det I_n[X, Y]``."""
    _check_enumerable(n)
    A = np.ascontiguousarray(reduced_boundary(n))
    r, N = A.shape
    out = []
    combos = itertools.combinations(range(N), r)
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=np.int64).reshape(-1, r)
        if not len(block):
            break
        mats = np.ascontiguousarray(A[:, block].transpose(1, 0, 2))
        dets = _kernels.bareiss_det_batch(mats)
        for idx in np.flatnonzero(dets):
            out.append((Complex2.from_indices(n, block[idx]), abs(int(dets[idx]))))
    return out


def exact_measure(n: int) -> dict[Complex2, Fraction]:
    """Exact determinantal probabilities ``|H_1|^2 / n^C(n-2,2)``."""
    total = n ** comb(n - 2, 2)
    return {K: Fraction(h * h, total) for K, h in enumerate_hypertrees(n)}
