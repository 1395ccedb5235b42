"""The numba and numpy implementations of every hot kernel must agree."""
from __future__ import annotations

import math

import numpy as np
import pytest

from hyperlab import _kernels
from hyperlab._accel import HAVE_NUMBA
from hyperlab.complex import reduced_boundary
from hyperlab.homology import peel
from hyperlab.linalg import BitMatrix
from hyperlab.samplers import RngState, hypertree_projection_basis, sample_one_out

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


@needs_numba
def test_gf2_rank_backends_agree():
    rng = np.random.default_rng(10)
    for _ in range(200):
        r, c = rng.integers(1, 200, size=2)
        M = BitMatrix.from_dense(rng.random((r, c)) < rng.random())
        a = _kernels.gf2_rank_inplace_nb(M.words.copy(), M.cols)
        b = _kernels.gf2_rank_inplace_np(M.words.copy(), M.cols)
        assert a == b


@needs_numba
@pytest.mark.parametrize("n", [100, 200])
def test_gf2_rank_backends_agree_on_one_out_cores(n):
    P = peel(sample_one_out(n, RngState(123, n)))
    W = P.bits()
    assert _kernels.gf2_rank_inplace_nb(W.words.copy(), W.cols) == _kernels.gf2_rank_inplace_np(W.words.copy(), W.cols)


@needs_numba
def test_modp_rank_backends_agree():
    rng = np.random.default_rng(11)
    for _ in range(200):
        p = int(rng.choice([3, 5, 7, 101]))
        r, c = rng.integers(1, 40, size=2)
        A = rng.integers(0, p, size=(r, c)) * (rng.random((r, c)) < 0.5)
        assert _kernels.modp_rank_inplace_nb(A.copy(), p) == _kernels.modp_rank_inplace_np(A.copy(), p)


@needs_numba
def test_bareiss_batch_backends_agree():
    A = np.ascontiguousarray(reduced_boundary(5))
    rng = np.random.default_rng(12)
    idx = np.array([rng.choice(10, 6, replace=False) for _ in range(100)])
    mats = np.ascontiguousarray(A[:, idx].transpose(1, 0, 2))
    assert np.array_equal(_kernels.bareiss_det_batch_nb(mats), _kernels.bareiss_det_batch_np(mats))
    ints = rng.integers(-9, 10, size=(50, 5, 5))
    assert np.array_equal(_kernels.bareiss_det_batch_nb(ints), _kernels.bareiss_det_batch_np(ints))


@needs_numba
@pytest.mark.parametrize("n", [5, 9, 14])
def test_dpp_backends_agree(n):
    B = hypertree_projection_basis(n)
    for t in range(20):
        u = RngState(77, t).generator().random(B.r + 32)
        a = _kernels.dpp_sample_nb(B.Q, u)
        b = _kernels.dpp_sample_np(B.Q, u)
        assert np.array_equal(np.sort(a), np.sort(b))
        assert len(a) == math.comb(n - 1, 2)


@needs_numba
def test_cut_norm_backends_agree():
    rng = np.random.default_rng(13)
    for m in range(1, 15):
        V = rng.uniform(-1, 1, (m, m))
        V = np.triu(V) + np.triu(V, 1).T
        assert _kernels.cut_norm_sum_nb(V) == pytest.approx(_kernels.cut_norm_sum_np(V), abs=1e-12)


def test_public_binding_follows_flag():
    from hyperlab._accel import USE_NUMBA

    expected = _kernels.gf2_rank_inplace_nb if USE_NUMBA else _kernels.gf2_rank_inplace_np
    assert _kernels.gf2_rank_inplace is expected


def test_env_flag_selects_numpy_backend():
    import os
    import subprocess
    import sys

    env = dict(os.environ, HYPERLAB_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from hyperlab._accel import backend; print(backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
