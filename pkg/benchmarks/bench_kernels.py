"""Time the numba and numpy occurrence kernels against each other.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5] [--max-bits 22]

Each row is the best of ``repeat`` runs after one warm-up call (the warm-up
absorbs numba compilation).  Both paths are checked for identical output.
"""

import argparse
import time

import numpy as np

from ergolab import _accel
from ergolab.kernels import counts_numpy, occurrence_counts


def best_time(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--max-bits", type=int, default=22)
    ap.add_argument("--sigma", default="0110")
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; only the numpy path can run")
        return
    k = len(args.sigma)
    pattern = int(args.sigma, 2)
    print(f"pattern {args.sigma}, best of {args.repeat}")
    print(f"{'bits':>5} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for bits in range(12, args.max_bits + 1, 2):
        n = bits - k + 1
        a = occurrence_counts(args.sigma, n, use_numba=True)
        b = counts_numpy(pattern, k, n)
        assert np.array_equal(a, b), "kernels disagree"
        t_nb = best_time(lambda: occurrence_counts(args.sigma, n, use_numba=True), args.repeat)
        t_np = best_time(lambda: counts_numpy(pattern, k, n), args.repeat)
        print(f"{bits:>5} {t_nb:>10.5f} {t_np:>10.5f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
