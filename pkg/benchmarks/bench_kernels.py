"""Compare the numba and numpy backends of the hot kernels.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from hhorseshoe import _kernels as kn
from hhorseshoe import thermo as th


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def cases():
    for depth in (12, 16, 20):
        tm = th.build_transfer(depth, 0.3, kind="reduced")
        args = (tm.indptr, tm.dst.astype(np.int64), tm.w_hi, np.ones(tm.n_states), 1e-12, 100_000)
        yield (f"power_iteration depth={depth} states={tm.n_states}",
               lambda a=args: kn._power_iteration_numpy(*a),
               lambda a=args: kn._power_iteration_numba(*a))
    word = "1" + ("0" * 7 + "1") * 400
    codes = np.ascontiguousarray(kn.word_codes(word), dtype=np.uint8)
    ys = np.linspace(1e-6, 1.0, 1000)
    checks = np.arange(2, len(word) + 1, 8, dtype=np.int64)
    yield (f"chain_logderiv_grid len={len(word)} grid=1000",
           lambda: kn._chain_logderiv_grid_numpy(codes, ys, 0.5, checks),
           lambda: kn._chain_logderiv_grid_numba(codes, ys, 0.5, checks))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not kn.HAVE_NUMBA:
        print("numba not available; nothing to compare")
        return
    print(f"{'kernel':44s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, f_np, f_nb in cases():
        f_nb()  # compile
        t_np = best_of(f_np, args.repeat)
        t_nb = best_of(f_nb, args.repeat)
        print(f"{name:44s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}")


if __name__ == "__main__":
    main()
