"""Hot inner loops.

Every kernel has a numba implementation (``*_nb``) and a pure-numpy one
(``*_np``); the public name is bound to one of them at import time according
to :data:`hyperlab._accel.USE_NUMBA`. Both variants take and return the same
types so tests can run them side by side.
"""
from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, njit

# ---------------------------------------------------------------------------
# GF(2) rank of a bit-packed matrix (destroys its input)
# ---------------------------------------------------------------------------


@njit
def gf2_rank_inplace_nb(W, ncols):
    rows, nw = W.shape
    rank = 0
    for c in range(ncols):
        if rank == rows:
            break
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        piv = -1
        for r in range(rank, rows):
            if W[r, w] & bit:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(w, nw):
                tmp = W[piv, k]
                W[piv, k] = W[rank, k]
                W[rank, k] = tmp
        for r in range(piv + 1, rows):
            if W[r, w] & bit:
                for k in range(w, nw):
                    W[r, k] ^= W[rank, k]
        rank += 1
    return rank


def gf2_rank_inplace_np(W, ncols):
    rows = W.shape[0]
    rank = 0
    for c in range(ncols):
        if rank == rows:
            break
        w, b = divmod(c, 64)
        nz = np.flatnonzero((W[rank:, w] >> np.uint64(b)) & np.uint64(1))
        if nz.size == 0:
            continue
        nz += rank
        piv = nz[0]
        if piv != rank:
            W[[rank, piv], w:] = W[[piv, rank], w:]
        if nz.size > 1:
            W[nz[1:], w:] ^= W[rank, w:]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# rank over F_p (destroys its input; entries already reduced to [0, p))
# ---------------------------------------------------------------------------


@njit
def modp_rank_inplace_nb(A, p):
    rows, cols = A.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        piv = -1
        for r in range(rank, rows):
            if A[r, c] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(c, cols):
                tmp = A[piv, k]
                A[piv, k] = A[rank, k]
                A[rank, k] = tmp
        # modular inverse by Fermat
        inv = 1
        base = A[rank, c] % p
        e = p - 2
        while e > 0:
            if e & 1:
                inv = inv * base % p
            base = base * base % p
            e >>= 1
        for k in range(c, cols):
            A[rank, k] = A[rank, k] * inv % p
        for r in range(rank + 1, rows):
            f = A[r, c]
            if f != 0:
                for k in range(c, cols):
                    A[r, k] = (A[r, k] - f * A[rank, k]) % p
        rank += 1
    return rank


def modp_rank_inplace_np(A, p):
    rows, cols = A.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.flatnonzero(A[rank:, c])
        if nz.size == 0:
            continue
        nz += rank
        piv = nz[0]
        if piv != rank:
            A[[rank, piv], c:] = A[[piv, rank], c:]
        inv = pow(int(A[rank, c]), p - 2, p)
        A[rank, c:] = A[rank, c:] * inv % p
        if nz.size > 1:
            f = A[nz[1:], c][:, None]
            A[nz[1:], c:] = (A[nz[1:], c:] - f * A[rank, c:]) % p
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# batched fraction-free determinants in int64
# ---------------------------------------------------------------------------


@njit
def bareiss_det_batch_nb(mats):
    k, s, _ = mats.shape
    out = np.zeros(k, dtype=np.int64)
    M = np.empty((s, s), dtype=np.int64)
    for b in range(k):
        for i in range(s):
            for j in range(s):
                M[i, j] = mats[b, i, j]
        sign = 1
        prev = 1
        zero = False
        for i in range(s - 1):
            if M[i, i] == 0:
                piv = -1
                for r in range(i + 1, s):
                    if M[r, i] != 0:
                        piv = r
                        break
                if piv < 0:
                    zero = True
                    break
                for c in range(s):
                    tmp = M[i, c]
                    M[i, c] = M[piv, c]
                    M[piv, c] = tmp
                sign = -sign
            for r in range(i + 1, s):
                for c in range(i + 1, s):
                    M[r, c] = (M[r, c] * M[i, i] - M[r, i] * M[i, c]) // prev
            prev = M[i, i]
        if zero:
            out[b] = 0
        elif s == 0:
            out[b] = 1
        else:
            out[b] = sign * M[s - 1, s - 1]
    return out


def bareiss_det_batch_np(mats):
    # exact integer path; python ints so no overflow concerns
    from .linalg import bareiss_det

    return np.array([bareiss_det(m.tolist()) for m in mats], dtype=np.int64)


# ---------------------------------------------------------------------------
# sequential projection-DPP sampler
# ---------------------------------------------------------------------------

REFRESH_EVERY = 64
TINY = 1e-12


@njit
def _refresh_nb(Q, E, t, colsq, d, selected):
    if t > 0:
        C = np.dot(E[:t], Q)
        for j in range(Q.shape[1]):
            acc = 0.0
            for s in range(t):
                acc += C[s, j] * C[s, j]
            v = colsq[j] - acc
            d[j] = v if v > 0.0 else 0.0
        for s in range(t):
            d[selected[s]] = 0.0
    else:
        for j in range(Q.shape[1]):
            d[j] = colsq[j]


@njit
def dpp_sample_nb(Q, uniforms):
    """Return the r selected column indices, or an array starting with -1."""
    r, N = Q.shape
    colsq = np.zeros(N)
    for i in range(r):
        for j in range(N):
            colsq[j] += Q[i, j] * Q[i, j]
    d = colsq.copy()
    E = np.zeros((r, r))
    selected = np.full(r, -1, dtype=np.int64)
    ptr = 0
    t = 0
    retried = False
    while t < r:
        if t > 0 and t % REFRESH_EVERY == 0 and not retried:
            _refresh_nb(Q, E, t, colsq, d, selected)
        if ptr >= uniforms.shape[0]:
            selected[0] = -1
            return selected
        total = 0.0
        for j in range(N):
            total += d[j]
        x = uniforms[ptr] * total
        ptr += 1
        j = N - 1
        acc = 0.0
        for jj in range(N):
            acc += d[jj]
            if x < acc:
                j = jj
                break
        v = Q[:, j].copy()
        for _ in range(2):
            if t > 0:
                coef = np.dot(E[:t], v)
                v -= np.dot(coef, E[:t])
        nv = np.sqrt(np.dot(v, v))
        if d[j] < TINY or nv < TINY:
            if retried:
                selected[0] = -1
                return selected
            retried = True
            _refresh_nb(Q, E, t, colsq, d, selected)
            continue
        retried = False
        u = v / nv
        E[t] = u
        c = np.dot(u, Q)
        for jj in range(N):
            val = d[jj] - c[jj] * c[jj]
            d[jj] = val if val > 0.0 else 0.0
        d[j] = 0.0
        selected[t] = j
        t += 1
    return selected


def _refresh_np(Q, E, t, colsq, d, selected):
    if t > 0:
        C = E[:t] @ Q
        d[:] = np.maximum(colsq - np.einsum("ij,ij->j", C, C), 0.0)
        d[selected[:t]] = 0.0
    else:
        d[:] = colsq


def dpp_sample_np(Q, uniforms):
    r, N = Q.shape
    colsq = np.einsum("ij,ij->j", Q, Q)
    d = colsq.copy()
    E = np.zeros((r, r))
    selected = np.full(r, -1, dtype=np.int64)
    ptr = 0
    t = 0
    retried = False
    while t < r:
        if t > 0 and t % REFRESH_EVERY == 0 and not retried:
            _refresh_np(Q, E, t, colsq, d, selected)
        if ptr >= len(uniforms):
            selected[0] = -1
            return selected
        cum = np.cumsum(d)
        j = int(np.searchsorted(cum, uniforms[ptr] * cum[-1], side="right"))
        j = min(j, N - 1)
        ptr += 1
        v = Q[:, j].copy()
        if t > 0:
            Et = E[:t]
            for _ in range(2):
                v -= (Et @ v) @ Et
        nv = float(np.sqrt(v @ v))
        if d[j] < TINY or nv < TINY:
            if retried:
                selected[0] = -1
                return selected
            retried = True
            _refresh_np(Q, E, t, colsq, d, selected)
            continue
        retried = False
        u = v / nv
        E[t] = u
        c = u @ Q
        np.maximum(d - c * c, 0.0, out=d)
        d[j] = 0.0
        selected[t] = j
        t += 1
    return selected


# ---------------------------------------------------------------------------
# exact cut norm of a step kernel: Gray-code walk over row subsets
# ---------------------------------------------------------------------------


@njit
def cut_norm_sum_nb(V):
    """max over S, T of |sum_{i in S, j in T} V[i, j]| (no 1/m^2 scaling)."""
    m = V.shape[0]
    c = np.zeros(m)
    best = 0.0
    gray = 0
    for step in range(1, 1 << m):
        # bit flipped between consecutive Gray codes = lowest set bit of step
        i = 0
        while not (step >> i) & 1:
            i += 1
        gray ^= 1 << i
        if (gray >> i) & 1:
            for j in range(m):
                c[j] += V[i, j]
        else:
            for j in range(m):
                c[j] -= V[i, j]
        pos = 0.0
        neg = 0.0
        for j in range(m):
            if c[j] > 0.0:
                pos += c[j]
            else:
                neg -= c[j]
        if pos > best:
            best = pos
        if neg > best:
            best = neg
    return best


def cut_norm_sum_np(V, chunk=1 << 15):
    m = V.shape[0]
    bits = np.arange(m, dtype=np.int64)
    best = 0.0
    for start in range(0, 1 << m, chunk):
        masks = np.arange(start, min(start + chunk, 1 << m), dtype=np.int64)
        S = ((masks[:, None] >> bits) & 1).astype(np.float64)
        C = S @ V
        pos = np.where(C > 0, C, 0.0).sum(axis=1).max()
        neg = -np.where(C < 0, C, 0.0).sum(axis=1).min()
        best = max(best, pos, neg)
    return float(best)


if USE_NUMBA:
    gf2_rank_inplace = gf2_rank_inplace_nb
    modp_rank_inplace = modp_rank_inplace_nb
    bareiss_det_batch = bareiss_det_batch_nb
    dpp_sample = dpp_sample_nb
    cut_norm_sum = cut_norm_sum_nb
else:
    gf2_rank_inplace = gf2_rank_inplace_np
    modp_rank_inplace = modp_rank_inplace_np
    bareiss_det_batch = bareiss_det_batch_np
    dpp_sample = dpp_sample_np
    cut_norm_sum = cut_norm_sum_np
