"""Compare the numba and numpy paths of the exponential quadrature kernel.

    python3 benchmarks/bench_kernels.py [--rows 64] [--nodes 4096] [--repeat 5]

Both paths are run on the same inputs, checked against each other, and timed
(best of ``--repeat``; the first numba call is reported separately because
it includes compilation or cache loading).
"""
import argparse
import time

import numpy as np

from dkdv._accel import HAVE_NUMBA
from dkdv.kernels import cumulative_exponential_quadrature


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--rows", type=int, default=64)
    p.add_argument("--nodes", type=int, default=4096)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()

    rng = np.random.default_rng(0)
    f = rng.standard_normal((args.rows, args.nodes)) + 1j * rng.standard_normal((args.rows, args.nodes))
    mu = -rng.uniform(0, 50, args.rows) + 1j * rng.uniform(-1e4, 1e4, args.rows)
    h = 1.0 / args.nodes

    ref = cumulative_exponential_quadrature(f, mu, h, jit=False)
    t_np = best_of(lambda: cumulative_exponential_quadrature(f, mu, h, jit=False), args.repeat)
    print(f"shape {args.rows}x{args.nodes}")
    print(f"numpy  {t_np * 1e3:9.2f} ms")
    if not HAVE_NUMBA:
        print("numba  not installed")
        return
    t0 = time.perf_counter()
    got = cumulative_exponential_quadrature(f, mu, h, jit=True)
    first = time.perf_counter() - t0
    t_jit = best_of(lambda: cumulative_exponential_quadrature(f, mu, h, jit=True), args.repeat)
    err = np.max(np.abs(got - ref)) / max(np.max(np.abs(ref)), 1e-300)
    print(f"numba  {t_jit * 1e3:9.2f} ms  (first call {first * 1e3:.1f} ms)")
    print(f"speedup {t_np / t_jit:.1f}x, max relative difference {err:.2e}")


if __name__ == "__main__":
    main()
