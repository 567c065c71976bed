"""Time the numba loop kernels against their numpy counterparts.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call (compilation, or loading from cache) is excluded.
"""
import argparse
import time

import numpy as np

from persuade_net import kernels
from persuade_net.graph import closed_adjacency, erdos_renyi


def best_of(fn, repeat):
    fn()  # warm-up / compile
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    g = erdos_renyi(18, 0.3, 1)
    yield "maximal independent sets (n=18)", (
        lambda: kernels.maximal_independent_masks_loop(g.neighbor_masks, g.n),
        lambda: kernels.maximal_independent_masks_numpy(g.neighbor_masks, g.n),
    )
    h = erdos_renyi(12, 0.4, 2)
    m = closed_adjacency(h)
    yield "support enumeration (n=12)", (
        lambda: kernels.support_equilibria_loop(m, 1.0, 1e-9, 1e-12, 1e-9),
        lambda: kernels.support_equilibria_numpy(m, 1.0, 1e-9, 1e-12, 1e-9),
    )
    x = np.linspace(0, 1, 200_001)
    y = np.log1p(5 * x) - 3 * x**2 + 0.01 * np.sin(400 * x)
    yield "upper hull (200k points)", (
        lambda: kernels.upper_hull_loop(x, y),
        lambda: kernels.upper_hull_numpy(x, y),
    )
    grid = np.linspace(0, 1, 2001)
    vals = np.sqrt(grid)
    axis = np.linspace(0, 1, 401)
    yield "policy sweep (401x401)", (
        lambda: kernels.policy_sweep_loop(axis, axis, 0.5, grid, vals),
        lambda: kernels.policy_sweep_numpy(axis, axis, 0.5, grid, vals),
    )


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':34s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for name, (fast, slow) in cases():
        t_nb = best_of(fast, args.repeat)
        t_np = best_of(slow, args.repeat)
        print(f"{name:34s} {1e3 * t_nb:11.2f} {1e3 * t_np:11.2f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
