"""Time the layered knapsack DP: numba kernel vs pure numpy.

    python3 benchmarks/bench_kernels.py [--repeat 20]

Table sizes mirror separation calls on the m in {9,...,36} comparison grid.
Both kernels must return identical tables; the script exits non-zero if not.
"""

import argparse
import sys
import time

import numpy as np

from coalman._accel import HAVE_NUMBA
from coalman._kernels import _layered_knapsack_numpy, layered_knapsack

SIZES = [(3, 9, 200), (4, 16, 600), (5, 25, 1500), (6, 36, 3000)]


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba unavailable or disabled; timing numpy only")
    rng = np.random.default_rng(args.seed)
    print(f"{'k':>3} {'m':>4} {'cap':>6} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for k, m, cap in SIZES:
        values = rng.random((k, m))
        costs = np.tile(np.arange(m), (k, 1)) * rng.integers(1, 3, size=(k, 1))
        t_np = _time(lambda: _layered_knapsack_numpy(values, costs, cap), args.repeat)
        if HAVE_NUMBA:
            q1, c1 = layered_knapsack(values, costs, cap, use_numba=True)  # compile outside timing
            q0, c0 = _layered_knapsack_numpy(values, costs, cap)
            if not (np.array_equal(q0, q1) and np.array_equal(c0, c1)):
                print(f"kernel mismatch at k={k} m={m} cap={cap}", file=sys.stderr)
                return 1
            t_nb = _time(lambda: layered_knapsack(values, costs, cap, use_numba=True), args.repeat)
            print(f"{k:>3} {m:>4} {cap:>6} {t_np*1e3:>10.3f} {t_nb*1e3:>10.3f} {t_np/t_nb:>7.1f}x")
        else:
            print(f"{k:>3} {m:>4} {cap:>6} {t_np*1e3:>10.3f} {'-':>10} {'-':>8}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
