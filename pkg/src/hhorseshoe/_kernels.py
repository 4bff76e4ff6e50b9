"""Hot numeric loops, compiled with numba when available.

Set ``HH_NO_NUMBA=1`` to force the pure-numpy implementations (useful for
debugging and for the benchmark in ``benchmarks/``).  ``HH_THREADS`` caps the
number of threads used by the parallel grid kernel.

Both backends expose the same two entry points:

``power_iteration(indptr, indices, data, x0, rtol, maxiter)``
    Dominant eigenpair of a nonnegative CSR matrix.  Returns
    ``(lam_lo, lam_hi, x, iters, converged)`` where ``[lam_lo, lam_hi]`` are
    the Collatz-Wielandt bounds ``min (Mx)_i/x_i`` and ``max (Mx)_i/x_i`` of
    the final iterate; they bracket the spectral radius for any positive x.

``chain_logderiv_grid(codes, ys, sigma, checkpoints)``
    ``log |Phi_w'(y)|`` of the central composition along the word ``codes``
    (uint8 zeros and ones), for every y in ``ys`` and every prefix length in
    ``checkpoints`` (sorted ascending).
"""
from __future__ import annotations

import math
import os

import numpy as np

_EM1 = math.exp(-1.0)


def _env_flag(name):
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


# ---------------------------------------------------------------- numpy path


def _power_iteration_numpy(indptr, indices, data, x0, rtol, maxiter):
    n = len(indptr) - 1
    rows = np.repeat(np.arange(n), np.diff(indptr))
    x = x0 / x0.sum()
    lo = 0.0
    hi = np.inf
    for it in range(1, maxiter + 1):
        y = np.bincount(rows, weights=data * x[indices], minlength=n)
        ratio = y / x
        lo = ratio.min()
        hi = ratio.max()
        s = y.sum()
        x = y / s
        if hi - lo <= rtol * hi:
            return lo, hi, x, it, True
    return lo, hi, x, maxiter, False


def _chain_logderiv_grid_numpy(codes, ys, sigma, checkpoints):
    ys = np.asarray(ys, dtype=float)
    y = ys.copy()
    c = 1.0 - ys
    acc = np.zeros_like(ys)
    out = np.empty((len(checkpoints), len(ys)))
    log_sigma = math.log(sigma)
    k = 0
    for pos in range(len(codes) + 1):
        while k < len(checkpoints) and checkpoints[k] == pos:
            out[k] = acc
            k += 1
        if pos == len(codes):
            break
        if codes[pos] == 0:
            d = y + c * _EM1
            acc = acc - 1.0 - 2.0 * np.log(d)
            y, c = y / d, c * _EM1 / d
        else:
            acc = acc + log_sigma
            y, c = sigma * c, 1.0 - sigma * c
    return out


# ---------------------------------------------------------------- numba path

try:
    if _env_flag("HH_NO_NUMBA"):
        raise ImportError("numba disabled by HH_NO_NUMBA")
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # prefer OpenMP; probing an outdated system TBB only produces a warning
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - exercised via the env flag
    HAVE_NUMBA = False


if HAVE_NUMBA:
    _threads = os.environ.get("HH_THREADS")
    if _threads:
        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))

    @njit(cache=True)
    def _power_iteration_numba(indptr, indices, data, x0, rtol, maxiter):
        n = len(indptr) - 1
        x = x0 / x0.sum()
        y = np.empty(n)
        lo = 0.0
        hi = np.inf
        for it in range(1, maxiter + 1):
            s = 0.0
            lo = np.inf
            hi = 0.0
            for i in range(n):
                acc = 0.0
                for p in range(indptr[i], indptr[i + 1]):
                    acc += data[p] * x[indices[p]]
                y[i] = acc
                s += acc
                r = acc / x[i]
                if r < lo:
                    lo = r
                if r > hi:
                    hi = r
            for i in range(n):
                x[i] = y[i] / s
            if hi - lo <= rtol * hi:
                return lo, hi, x, it, True
        return lo, hi, x, maxiter, False

    @njit(cache=True, parallel=True)
    def _chain_logderiv_grid_numba(codes, ys, sigma, checkpoints):
        m = len(ys)
        ncp = len(checkpoints)
        out = np.empty((ncp, m))
        log_sigma = math.log(sigma)
        em1 = math.exp(-1.0)
        nc = len(codes)
        for g in prange(m):
            y = ys[g]
            c = 1.0 - y
            acc = 0.0
            k = 0
            for pos in range(nc + 1):
                while k < ncp and checkpoints[k] == pos:
                    out[k, g] = acc
                    k += 1
                if pos == nc:
                    break
                if codes[pos] == 0:
                    d = y + c * em1
                    acc += -1.0 - 2.0 * math.log(d)
                    y, c = y / d, c * em1 / d
                else:
                    acc += log_sigma
                    y, c = sigma * c, 1.0 - sigma * c
        return out

    BACKEND = "numba"
    _power_iteration_impl = _power_iteration_numba
    _chain_impl = _chain_logderiv_grid_numba
else:
    BACKEND = "numpy"
    _power_iteration_impl = _power_iteration_numpy
    _chain_impl = _chain_logderiv_grid_numpy


def power_iteration(indptr, indices, data, x0=None, rtol=1e-12, maxiter=100_000):
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    data = np.ascontiguousarray(data, dtype=np.float64)
    n = len(indptr) - 1
    x0 = np.ones(n) if x0 is None else np.array(x0, dtype=np.float64)
    lo, hi, x, it, ok = _power_iteration_impl(indptr, indices, data, x0, float(rtol), int(maxiter))
    return float(lo), float(hi), np.asarray(x), int(it), bool(ok)


def chain_logderiv_grid(codes, ys, sigma, checkpoints):
    codes = np.ascontiguousarray(codes, dtype=np.uint8)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    checkpoints = np.ascontiguousarray(checkpoints, dtype=np.int64)
    if np.any(np.diff(checkpoints) < 0):
        raise ValueError("checkpoints must be sorted")
    if len(checkpoints) and (checkpoints[0] < 0 or checkpoints[-1] > len(codes)):
        raise ValueError("checkpoint outside the word")
    return _chain_impl(codes, ys, float(sigma), checkpoints)


def word_codes(w: str):
    return np.frombuffer(w.encode("ascii"), dtype=np.uint8) - ord("0")
