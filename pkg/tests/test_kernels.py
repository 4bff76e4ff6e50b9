import os
import subprocess
import sys

import numpy as np
import pytest

from hhorseshoe import _kernels as K
from hhorseshoe import thermo as th


def _csr(k, t):
    tm = th.build_transfer(k, t)
    return tm.indptr, tm.dst, tm.w_lo


def test_numpy_power_iteration_brackets_dense():
    indptr, idx, data = _csr(7, 0.4)
    lo, hi, x, it, ok = K._power_iteration_numpy(indptr, idx, data, np.ones(len(indptr) - 1), 1e-12, 10_000)
    n = len(indptr) - 1
    m = np.zeros((n, n))
    for i in range(n):
        m[i, idx[indptr[i]:indptr[i + 1]]] = data[indptr[i]:indptr[i + 1]]
    rho = max(abs(np.linalg.eigvals(m)))
    assert ok and lo <= rho * (1 + 1e-13) and rho <= hi * (1 + 1e-13)


@pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not available")
def test_backends_agree():
    indptr, idx, data = _csr(10, 0.3)
    x0 = np.ones(len(indptr) - 1)
    a = K._power_iteration_numpy(indptr, idx, data, x0, 1e-12, 10_000)
    b = K._power_iteration_numba(indptr, idx, data, x0, 1e-12, 10_000)
    assert a[3] == b[3]
    assert a[0] == pytest.approx(b[0], rel=1e-14) and a[1] == pytest.approx(b[1], rel=1e-14)
    assert np.allclose(a[2], b[2], rtol=1e-12)

    w = "1001010001" * 5
    codes = K.word_codes(w)
    ys = np.linspace(0, 1, 101)
    cps = np.array([0, 3, 10, len(w)])
    ga = K._chain_logderiv_grid_numpy(codes, ys, 0.25, cps)
    gb = K._chain_logderiv_grid_numba(codes, ys, 0.25, cps)
    assert np.allclose(ga, gb, rtol=1e-13, atol=1e-13)
    assert np.all(ga[0] == 0)


def test_chain_checkpoint_validation():
    with pytest.raises(ValueError):
        K.chain_logderiv_grid(K.word_codes("010"), [0.5], 0.25, [2, 1])
    with pytest.raises(ValueError):
        K.chain_logderiv_grid(K.word_codes("010"), [0.5], 0.25, [5])


def test_nonconvergence_reported():
    indptr, idx, data = _csr(8, 0.2)
    lo, hi, x, it, ok = K.power_iteration(indptr, idx, data, rtol=1e-15, maxiter=3)
    assert not ok and it == 3 and lo <= hi


def test_numpy_fallback_selected_by_env():
    code = "import hhorseshoe._kernels as K; print(K.BACKEND, K.HAVE_NUMBA)"
    env = dict(os.environ, HH_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "False"]


def test_fallback_pressure_matches():
    code = "from hhorseshoe import thermo as th; e = th.pressure(10, 0.3); print(repr(e.p_low), repr(e.p_high))"
    env = dict(os.environ, HH_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    lo, hi = map(float, out.stdout.split())
    e = th.pressure(10, 0.3)
    assert lo == pytest.approx(e.p_low, rel=1e-12) and hi == pytest.approx(e.p_high, rel=1e-12)
