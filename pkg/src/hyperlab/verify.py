"""Invariant suites behind ``hyperlab verify``.

Each check raises :class:`InvariantViolation` carrying the first offending case;
:func:`verify_suite` runs them all and collects the outcome.
"""
from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from . import bounds, graphon
from .complex import (
    all_graphs,
    coboundary_mask,
    cut_edges,
    edge_array,
    full_boundary,
    graph_from_mask,
    num_edges,
    num_triangles,
    reduced_boundary,
    t_count_array,
    triangle_array,
    vertex_boundary,
)
from .errors import InvariantViolation
from .homology import h1_torsion_order
from .linalg import BitMatrix, bareiss_det, gf2_rank, gram_det, snf
from .samplers import (
    RngState,
    enumerate_hypertrees,
    hypertree_projection_basis,
    sample_hypertree,
)

GIBBS_TOL = 1e-9
IDENTITY_TOL = 1e-9
COMPLEMENT_TOL = 1e-12
NORM_TOL = 1e-12


def _fail(msg: str, **case):
    raise InvariantViolation(msg, case=case)


# ---------------------------------------------------------------------------
# individual checks; each returns a short human-readable detail string
# ---------------------------------------------------------------------------

def check_kalai(n: int) -> str:
    total = sum(h * h for _, h in enumerate_hypertrees(n))
    want = n ** comb(n - 2, 2)
    if total != want:
        _fail("sum of squared |H_1| over hypertrees differs from n^C(n-2,2)", n=n, got=total, want=want)
    return f"n={n}: sum |H_1|^2 = {total}"


def snf_order_of_boundary(n: int, cols) -> int:
    """|H_1| from the Smith form of the full boundary restricted to ``cols``; 0 if infinite."""
    D = full_boundary(n).toarray(np.asarray(cols))
    s = snf(D)
    if s.rank != num_edges(n) - (n - 1):
        return 0
    return s.torsion_order


def check_det_oracle(n: int = 5) -> str:
    A = reduced_boundary(n)
    r, N = A.shape
    agree = 0
    for Y in itertools.combinations(range(N), r):
        d = abs(bareiss_det(A[:, list(Y)]))
        h = snf_order_of_boundary(n, Y)
        if d != h:
            _fail("|det I_n[X,Y]| disagrees with the Smith form order", n=n, Y=list(Y), det=d, snf=h)
        agree += 1
    return f"n={n}: {agree}/{comb(N, r)} agreements"


def check_boundary_composition(nmax: int = 8) -> str:
    for n in range(3, nmax + 1):
        P = vertex_boundary(n) @ full_boundary(n).toarray()
        if np.any(P):
            _fail("d1 . d2 is not zero", n=n)
    return f"3 <= n <= {nmax}"


def check_parity_duality(nmax: int, per_n: int, seed: int) -> str:
    rng = np.random.default_rng(seed)
    for n in range(3, nmax + 1):
        M = full_boundary(n)
        for _ in range(per_n):
            g = rng.random(num_edges(n)) < 0.5
            G = [tuple(e) for e in edge_array(n)[g]]
            odd = g[M.col_rows].sum(axis=1) % 2 == 1
            if not np.array_equal(odd, coboundary_mask(n, G)):
                _fail("coboundary differs from the boundary parity rule", n=n, G=G)
    return f"n <= {nmax}, {per_n} graphs per n"


def check_cuts(nmax: int = 7) -> str:
    for n in range(3, nmax + 1):
        for bits in range(1 << (n - 1)):
            U = [v + 1 for v in range(n) if bits >> v & 1]
            if coboundary_mask(n, cut_edges(n, U)).any():
                _fail("cut is not a cocycle", n=n, U=U)
    return f"all cuts, n <= {nmax}"


def check_t_count_sum(trials: int, seed: int) -> str:
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        n = int(rng.integers(3, 10))
        mask = rng.random(num_triangles(n)) < rng.random()
        if int(t_count_array(n, mask).sum()) != 3 * int(mask.sum()):
            _fail("sum of t-counts is not 3|Y|", n=n, Y=np.flatnonzero(mask).tolist())
    return f"{trials} random Y"


def check_gram_kalai() -> str:
    for n in (4, 5, 6):
        g = gram_det(reduced_boundary(n))
        if g != n ** comb(n - 2, 2):
            _fail("gram determinant of the reduced boundary is not n^C(n-2,2)", n=n, got=g)
    return "n = 4, 5, 6"


def check_rank_consistency(trials: int, seed: int) -> str:
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        r, c = rng.integers(1, 7, size=2)
        M = rng.integers(-4, 5, size=(r, c))
        s = snf(M)
        want = s.rank - sum(1 for d in s.factors if d % 2 == 0)
        got = gf2_rank(BitMatrix.from_dense(M % 2))
        if got != want:
            _fail("F_2 rank differs from the Smith form prediction", M=M.tolist(), got=got, want=want)
    return f"{trials} random integer matrices"


def check_sampler_support(ns, per_n: int, seed: int) -> str:
    for n in ns:
        basis = hypertree_projection_basis(n)
        for i in range(per_n):
            K = sample_hypertree(n, RngState(seed, i), basis)
            if len(K) != comb(n - 1, 2) or math.isinf(h1_torsion_order(K)):
                _fail("sampler produced a non-hypertree", n=n, trial=i, triangles=K.triangles)
    return f"n in {list(ns)}, {per_n} samples each"


def check_kernel_trace(nmax: int) -> str:
    for n in range(3, nmax + 1):
        tr = float(hypertree_projection_basis(n).kernel_diagonal().sum())
        if abs(tr - comb(n - 1, 2)) > 1e-6:
            _fail("kernel trace differs from the hypertree size", n=n, trace=tr)
    return f"3 <= n <= {nmax}"


def check_upperb(ns, random_n6: int, seed: int) -> str:
    count = 0
    for n in ns:
        for G in all_graphs(n):
            Y = ~coboundary_mask(n, G)
            _check_log_le(bounds.prob_subcomplex_exact(n, Y), bounds.upperb_bound(n, Y), n=n, G=G)
            count += 1
    rng = np.random.default_rng(seed)
    n = 6
    for _ in range(random_n6):
        Y = rng.random(num_triangles(n)) < rng.uniform(0.3, 1.0)
        _check_log_le(bounds.prob_subcomplex_exact(n, Y), bounds.upperb_bound(n, Y),
                      n=n, Y=[list(map(int, t)) for t in triangle_array(n)[Y]])
        count += 1
    return f"{count} cases, zero violations"


def _check_log_le(q: Fraction, bound: float, **case):
    if not bounds.certified_le(q, bound):
        _fail("exact log-probability exceeds the bound", prob=str(q), bound=bound, **case)


def check_upperbf(n: int) -> str:
    count = 0
    for G in all_graphs(n):
        _check_log_le(bounds.prob_cocycle_exact(n, G), bounds.upperbf_bound(n, G), n=n, G=G)
        count += 1
    return f"n={n}: {count} graphs"


def check_one_out_bound(n: int, trials: int, seed: int) -> str:
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        G = graph_from_mask(n, int(rng.integers(0, 1 << num_edges(n))))
        q = bounds.one_out_cocycle_prob(n, G)
        if not bounds.certified_le(q, bounds.one_out_bound(n, G), slack=1e-9):
            _fail("one-out cocycle probability exceeds the bound", n=n, G=G, prob=str(q))
    return f"n={n}: {trials} graphs"


def check_discrete_identity(trials: int, nmax: int, seed: int) -> str:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(3, nmax + 1))
        G = [tuple(map(int, e)) for e in edge_array(n)[rng.random(num_edges(n)) < rng.random()]]
        a = bounds.discrete_f(n, G)
        b = graphon.f_functional(graphon.graphon_of_graph(G, n))
        err = abs(a - b)
        if not err <= IDENTITY_TOL:
            _fail("discrete f differs from f(W_G)", n=n, G=G, discrete=a, graphon=b)
        worst = max(worst, err)
    return f"{trials} graphs, n <= {nmax}, max error {worst:.2e}"


def graphon_property_suite(trials: int, seed: int, mmax: int = 16) -> str:
    rng = np.random.default_rng(seed)
    ks = (1.0, 2.0, 4.0, 8.0, 16.0)
    for t in range(trials):
        m = int(rng.integers(1, mmax + 1))
        W = graphon.random_graphon(m, rng)
        f = graphon.f_functional(W)
        h = graphon.entropy_H(W)
        if not f + h <= GIBBS_TOL:
            _fail("f + H is positive", trial=t, W=W.values.tolist(), f=f, H=h)

        V = graphon.random_kernel(m, rng, scale=float(rng.uniform(0.1, 3.0)))
        c, l1, li = graphon.cut_norm_exact(V), graphon.l1_norm(V), graphon.linf_norm(V)
        if not (c <= l1 + NORM_TOL and l1 <= li + NORM_TOL):
            _fail("cut <= L1 <= Linf chain broken", trial=t, V=V.values.tolist())

        m2 = min(m, 12)
        A = graphon.random_kernel(m2, rng)
        B = graphon.random_kernel(m2, rng)
        lhs = graphon.l1_norm(graphon.op_product(A, B))
        for rhs in (4 * graphon.cut_norm_exact(A) * graphon.linf_norm(B),
                    4 * graphon.linf_norm(A) * graphon.cut_norm_exact(B)):
            if not lhs <= rhs + NORM_TOL:
                _fail("product norm bound broken", trial=t, V=A.values.tolist(), W=B.values.tolist())

        w = W.values
        direct = (w @ w + (1 - w) @ (1 - w)) / m
        if np.abs(1.0 - graphon.z_kernel(W).values - direct).max() > COMPLEMENT_TOL:
            _fail("1 - Z_W complement identity broken", trial=t, W=w.tolist())

        prev = math.inf
        for k in ks:
            fk = graphon.f_k_functional(W, k)
            if fk > prev + 1e-12 or fk < f - 1e-12:
                _fail("f_k not monotone or below f", trial=t, W=w.tolist(), k=k, fk=fk, f=f)
            prev = fk
    return f"{trials} random graphons, m <= {mmax}"


def check_cohen_lenstra() -> str:
    for p in (2, 3, 5):
        total = sum(bounds.cohen_lenstra_pmf(p, r, 64) for r in range(11))
        if abs(total - 1) > 1e-6:
            _fail("Cohen-Lenstra reference does not sum to 1", p=p, total=total)
    return "p in 2, 3, 5"


def check_projective_plane() -> str:
    from .complex import projective_plane

    K = projective_plane()
    if h1_torsion_order(K) != 2:
        _fail("projective plane should have |H_1| = 2", triangles=K.triangles)
    return "|H_1(RP^2)| = 2"


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float
    case: dict | None = None


@dataclass
class VerifyReport:
    level: str
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures_json(self) -> str:
        bad = [{"check": r.name, "message": r.detail, "case": r.case} for r in self.results if not r.passed]
        return json.dumps(bad, indent=2, default=str)


def _plan(level: str, seed: int):
    full = level == "full"
    yield "kalai n=5", lambda: check_kalai(5)
    if full:
        yield "kalai n=6", lambda: check_kalai(6)
    yield "det oracle n=5", lambda: check_det_oracle(5)
    yield "boundary composition", lambda: check_boundary_composition(8)
    yield "parity duality", lambda: check_parity_duality(6, 100 if full else 20, seed)
    yield "cuts are cocycles", lambda: check_cuts(7 if full else 5)
    yield "t-count sum", lambda: check_t_count_sum(200 if full else 50, seed)
    yield "gram determinant", check_gram_kalai
    yield "rank consistency", lambda: check_rank_consistency(200 if full else 50, seed)
    yield "projective plane", check_projective_plane
    yield "sampler support", lambda: check_sampler_support(
        range(4, 13) if full else range(4, 9), 1000 if full else 50, seed)
    yield "kernel trace", lambda: check_kernel_trace(30 if full else 12)
    yield "upperb soundness", lambda: check_upperb((4, 5) if full else (4,), 500 if full else 30, seed)
    yield "upperbf soundness", lambda: check_upperbf(5 if full else 4)
    yield "one-out bound", lambda: check_one_out_bound(6, 200 if full else 50, seed)
    yield "discrete f identity", lambda: check_discrete_identity(500 if full else 100, 40 if full else 20, seed)
    yield "graphon properties", lambda: graphon_property_suite(1000 if full else 100, seed)
    yield "cohen-lenstra normalisation", check_cohen_lenstra


def verify_suite(level: str = "fast", seed: int = 20240601, progress=None) -> VerifyReport:
    if level not in ("fast", "full"):
        raise ValueError("level must be 'fast' or 'full'")
    report = VerifyReport(level)
    for name, fn in _plan(level, seed):
        t0 = time.perf_counter()
        try:
            res = CheckResult(name, True, fn(), 0.0)
        except InvariantViolation as exc:
            res = CheckResult(name, False, str(exc), 0.0, exc.case)
        res.seconds = time.perf_counter() - t0
        report.results.append(res)
        if progress is not None:
            progress(res)
    return report
