"""Compare the numba and numpy flavours of the hot kernels, plus the eigensolvers.

Usage: ``python3 benchmarks/bench_kernels.py [--repeat 5]``.  Prints one line
per (kernel, flavour) with the best wall time; the numba rows exclude the
first (compiling) call.
"""

import argparse
import time

import numpy as np

from kcuts import kernels
from kcuts.graph import random_geometric, ring_of_cliques
from kcuts.spectral import bottom_k_eigs, normalized_laplacian


def best_time(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    big = random_geometric(20_000, 0.015, seed=0)
    order = np.random.default_rng(0).permutation(big.n)
    ia = big.kernel_arrays
    small = ring_of_cliques(4, 4, 0.3)
    tiny = ring_of_cliques(3, 3, 0.3)
    dense = np.ascontiguousarray(small.dense_adjacency())

    cases = [
        (f"sweep_profile n={big.n} m={big.m}",
         lambda: kernels.sweep_profile_nb(order, *ia[:3], big.degrees),
         lambda: kernels.sweep_profile_np(order, *ia[3:6], big.degrees)),
        (f"subset_expansions n={small.n}",
         lambda: kernels.subset_expansions_nb(dense, small.degrees),
         lambda: kernels.subset_expansions_np(small.src, small.dst, small.weight, small.degrees)),
        (f"labeling_objective n={tiny.n} k=3",
         lambda: kernels.labeling_objective_nb(3, tiny.src, tiny.dst, tiny.weight, tiny.degrees),
         lambda: kernels.labeling_objective_np(3, tiny.src, tiny.dst, tiny.weight, tiny.degrees)),
    ]
    print(f"{'kernel':42s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, nb, npf in cases:
        a, b = best_time(nb, args.repeat), best_time(npf, args.repeat)
        print(f"{name:42s} {a:10.4f} {b:10.4f} {b / a:8.1f}")

    g = ring_of_cliques(64, 32, 0.1)
    lap = normalized_laplacian(g)
    for mode in ("dense", "lanczos"):
        t = best_time(lambda: bottom_k_eigs(lap, 32, mode=mode), max(1, args.repeat // 2))
        print(f"{'bottom_k_eigs n=2048 k=32 ' + mode:42s} {t:10.4f}")


if __name__ == "__main__":
    main()
