"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

The first numba call per kernel (compilation or cache load) is excluded.
"""
from __future__ import annotations

import argparse
import itertools
import time

import numpy as np

from hyperlab import _kernels
from hyperlab._accel import HAVE_NUMBA
from hyperlab.complex import reduced_boundary
from hyperlab.homology import peel
from hyperlab.samplers import RngState, hypertree_projection_basis, sample_one_out


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(quick: bool):
    n_oo = 60 if quick else 120
    W = peel(sample_one_out(n_oo, RngState(1))).bits()
    yield (f"gf2 rank, one-out n={n_oo} core {W.rows}x{W.cols}",
           lambda f: f(W.words.copy(), W.cols), "gf2_rank_inplace")

    rng = np.random.default_rng(0)
    A = rng.integers(0, 3, size=(150, 150) if quick else (300, 300))
    yield (f"rank mod 3, {A.shape[0]}x{A.shape[1]}", lambda f: f(A.copy(), 3), "modp_rank_inplace")

    R = np.ascontiguousarray(reduced_boundary(5))
    idx = np.array(list(itertools.combinations(range(10), 6)))
    mats = np.ascontiguousarray(R[:, idx].transpose(1, 0, 2))
    yield ("bareiss batch, 210 6x6", lambda f: f(mats), "bareiss_det_batch")

    n_dpp = 12 if quick else 20
    B = hypertree_projection_basis(n_dpp)
    u = RngState(2).generator().random(B.r + 32)
    yield (f"projection sampler, n={n_dpp} ({B.r}x{B.N})", lambda f: f(B.Q, u), "dpp_sample")

    m = 14 if quick else 18
    V = rng.uniform(-1, 1, (m, m))
    V = np.triu(V) + np.triu(V, 1).T
    yield (f"cut norm, m={m}", lambda f: f(V), "cut_norm_sum")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':<48} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for label, call, name in cases(args.quick):
        nb = getattr(_kernels, name + "_nb")
        np_ = getattr(_kernels, name + "_np")
        call(nb)  # compile / load cache
        t_nb = best_of(lambda: call(nb), args.repeat)
        t_np = best_of(lambda: call(np_), args.repeat)
        print(f"{label:<48} {t_nb * 1e3:>8.2f}ms {t_np * 1e3:>8.2f}ms {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
