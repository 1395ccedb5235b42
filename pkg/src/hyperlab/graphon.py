"""Uniform step kernels and graphons, and the functionals evaluated on them.

A step kernel with ``m`` blocks is an ``m x m`` matrix ``V``; block ``(i, j)``
has measure ``1/m^2``. Every integral over ``[0,1]^2`` becomes a mean over the
entries, and the operator product becomes ``V @ W / m``.

Natural logs throughout. ``0 * log 0`` is taken as 0 and ``-inf`` is carried as
IEEE ``-inf``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.special import xlogy

from . import _kernels
from .complex import check_n, normalize_edges
from .errors import FormatError

EXACT_CUT_MAX_M = 24
_RANGE_TOL = 1e-12


@dataclass(frozen=True)
class StepKernel:
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] == 0:
            raise ValueError("step kernel needs a non-empty square matrix")
        if not np.all(np.isfinite(v)):
            raise ValueError("step kernel entries must be finite")
        if not np.array_equal(v, v.T):
            raise ValueError("step kernel must be symmetric")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    def permuted(self, perm) -> "StepKernel":
        perm = np.asarray(perm)
        return type(self)(self.values[np.ix_(perm, perm)])

    def __sub__(self, other):
        return StepKernel(self.values - _vals(other))


@dataclass(frozen=True)
class StepGraphon(StepKernel):
    def __post_init__(self):
        super().__post_init__()
        if self.values.min() < 0 or self.values.max() > 1:
            raise ValueError("graphon entries must lie in [0, 1]")

    def complement(self) -> "StepGraphon":
        return StepGraphon(1.0 - self.values)


def constant(c: float, m: int = 1) -> StepKernel:
    cls = StepGraphon if 0 <= c <= 1 else StepKernel
    return cls(np.full((m, m), float(c)))


def _vals(V) -> np.ndarray:
    return V.values if isinstance(V, StepKernel) else np.asarray(V, dtype=np.float64)


def graphon_of_graph(G, n: int) -> StepGraphon:
    """``W_G``: n blocks, 1 on block (u, v) iff {u, v} is an edge."""
    check_n(n, 1)
    A = np.zeros((n, n))
    for a, b in normalize_edges(n, G):
        A[a - 1, b - 1] = A[b - 1, a - 1] = 1.0
    return StepGraphon(A)


def adjacency(G, n: int) -> np.ndarray:
    A = np.zeros((n, n), dtype=np.int64)
    for a, b in normalize_edges(n, G):
        A[a - 1, b - 1] = A[b - 1, a - 1] = 1
    return A


def random_graphon(m: int, rng, atoms: bool = True) -> StepGraphon:
    """Random symmetric step graphon; with ``atoms`` some entries snap to 0, 1/2, 1."""
    U = rng.random((m, m))
    if atoms:
        snap = rng.random((m, m))
        U = np.where(snap < 0.1, 0.0, U)
        U = np.where((snap >= 0.1) & (snap < 0.2), 1.0, U)
        U = np.where((snap >= 0.2) & (snap < 0.25), 0.5, U)
    U = np.triu(U) + np.triu(U, 1).T
    return StepGraphon(U)


def random_kernel(m: int, rng, scale: float = 1.0) -> StepKernel:
    U = rng.uniform(-scale, scale, (m, m))
    return StepKernel(np.triu(U) + np.triu(U, 1).T)


# ---------------------------------------------------------------------------
# products and norms
# ---------------------------------------------------------------------------

def op_product(V, W) -> np.ndarray:
    """Blockwise ``(V o W)(i, j) = (1/m) sum_t V(i, t) W(t, j)``; may be asymmetric."""
    a, b = _vals(V), _vals(W)
    if a.shape != b.shape:
        raise ValueError(f"block structures differ: {a.shape} vs {b.shape}")
    return a @ b / a.shape[0]


def l1_norm(V) -> float:
    return float(np.abs(_vals(V)).mean())


def linf_norm(V) -> float:
    return float(np.abs(_vals(V)).max())


class CutNorm(NamedTuple):
    value: float
    exact: bool


def cut_norm_exact(V) -> float:
    """Cut norm of a step kernel, exact for ``m <= 24``.

    The optimum is a union of blocks. For each row set S the best column set
    takes all columns with positive (or all with negative) partial sums, so
    only the ``2^m`` row sets are enumerated.
    """
    a = _vals(V)
    m = a.shape[0]
    if m > EXACT_CUT_MAX_M:
        raise ValueError(f"exact cut norm is limited to m <= {EXACT_CUT_MAX_M}; use cut_norm()")
    return float(_kernels.cut_norm_sum(np.ascontiguousarray(a))) / (m * m)


def cut_norm_heuristic(V, restarts: int = 32, rng=None) -> float:
    """Alternating maximisation over (S, T). Always a lower bound on the cut norm."""
    a = _vals(V)
    m = a.shape[0]
    rng = np.random.default_rng(0) if rng is None else rng
    best = 0.0
    for _ in range(restarts):
        for sign in (1.0, -1.0):
            s = rng.random(m) < 0.5
            val = -np.inf
            while True:
                t = sign * (s @ a) > 0
                s = sign * (a @ t) > 0
                new = sign * float(s @ a @ t)
                if new <= val + 1e-15:
                    break
                val = new
            best = max(best, val)
    return best / (m * m)


def cut_norm(V) -> CutNorm:
    a = _vals(V)
    if a.shape[0] <= EXACT_CUT_MAX_M:
        return CutNorm(cut_norm_exact(a), True)
    return CutNorm(cut_norm_heuristic(a), False)


def inner(V, W) -> float:
    """``<V, W>`` as a block mean; ``0 * (-inf) = 0``, may return ``-inf``."""
    a, b = _vals(V), _vals(W)
    if a.shape != b.shape:
        raise ValueError(f"block structures differ: {a.shape} vs {b.shape}")
    if np.any(np.isposinf(a)) or np.any(np.isposinf(b)):
        raise ValueError("+inf entries are not supported")
    bad = (np.isneginf(b) & (a < 0)) | (np.isneginf(a) & (b < 0))
    if np.any(bad):
        raise ValueError("inner product would involve +inf")
    with np.errstate(invalid="ignore"):
        prod = np.where((a == 0) | (b == 0), 0.0, a * b)
    return float(prod.mean())


# ---------------------------------------------------------------------------
# Z_W and the functionals
# ---------------------------------------------------------------------------

def _z_pair(W) -> tuple[np.ndarray, np.ndarray]:
    w = _vals(W)
    m = w.shape[0]
    c = 1.0 - w
    cross = w @ c
    Z = (cross + cross.T) / m
    # 1 - Z from its own nonnegative expansion avoids cancellation near Z = 1
    one_minus = (w @ w + c @ c) / m
    for arr in (Z, one_minus):
        if arr.min() < -_RANGE_TOL or arr.max() > 1 + _RANGE_TOL:
            raise FloatingPointError("Z_W left [0, 1] beyond tolerance")
        np.clip(arr, 0.0, 1.0, out=arr)
    return Z, one_minus


def z_kernel(W) -> StepGraphon:
    """``Z_W = W o (1-W) + (1-W) o W``, the symmetric graphon with ``1 - Z_W = W o W + (1-W) o (1-W)``."""
    Z, _ = _z_pair(W)
    return StepGraphon(np.triu(Z) + np.triu(Z, 1).T)


def one_minus_z(W) -> np.ndarray:
    return _z_pair(W)[1]


def rate_I(p: float, W) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    u = _vals(W)
    val = 0.5 * (xlogy(u, u) - u * np.log(p) + xlogy(1 - u, 1 - u) - (1 - u) * np.log1p(-p))
    return float(val.mean())


def entropy_H(W) -> float:
    u = _vals(W)
    return float((-xlogy(u, u) - xlogy(1 - u, 1 - u)).mean())


def f_functional(W) -> float:
    """``<W, log Z_W> + <1-W, log(1-Z_W)>``; non-positive, possibly ``-inf``."""
    w = _vals(W)
    Z, one_minus = _z_pair(w)
    with np.errstate(divide="ignore"):
        val = xlogy(w, Z) + xlogy(1 - w, one_minus)
    return float(val.mean())


def f_k_functional(W, k: float) -> float:
    """``f`` with ``log`` replaced by ``max(-k, log)``; always finite."""
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    w = _vals(W)
    Z, one_minus = _z_pair(w)
    with np.errstate(divide="ignore"):
        lz = np.maximum(-k, np.log(Z))
        lc = np.maximum(-k, np.log(one_minus))
    return float((w * lz + (1 - w) * lc).mean())


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def format_kernel(V) -> str:
    a = _vals(V)
    lines = [str(a.shape[0])]
    lines += [" ".join(f"{x:.17g}" for x in row) for row in a]
    return "\n".join(lines) + "\n"


def parse_kernel(text: str) -> StepKernel:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 1:
        raise FormatError("first line must be the block count m")
    try:
        m = int(rows[0][0])
        vals = np.array([[float(x) for x in r] for r in rows[1:]], dtype=np.float64)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if vals.shape != (m, m):
        raise FormatError(f"expected {m} rows of {m} values")
    try:
        if vals.min() >= 0 and vals.max() <= 1:
            return StepGraphon(vals)
        return StepKernel(vals)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_kernel(path) -> StepKernel:
    return parse_kernel(Path(path).read_text())

