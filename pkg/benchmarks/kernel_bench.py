#!/usr/bin/env python3
"""Times the numba and pure-numpy builds of each scoring kernel on
workloads shaped like real evaluation runs (250-token texts, dim-100
vectors, 15-word window sets).

Usage:
    python benchmarks/kernel_bench.py [--repeats N] [--csv FILE]
"""

import argparse
import csv
import sys
import time

import numpy as np

from lexmrc import kernels


def time_call(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def build_workloads(rng):
    n_tokens = 250
    dim = 100
    weights = np.where(rng.random(n_tokens) < 0.15, rng.random(n_tokens), 0.0)
    pos_a = np.sort(rng.integers(0, n_tokens, size=12)).astype(np.int64)
    pos_b = np.sort(rng.integers(0, n_tokens, size=20)).astype(np.int64)
    rows = rng.standard_normal((n_tokens, dim))
    known = (rng.random(n_tokens) < 0.9).astype(np.int64)
    vec_prefix = np.zeros((n_tokens + 1, dim))
    vec_prefix[1:] = np.cumsum(rows * known[:, None], axis=0)
    cnt_prefix = np.zeros(n_tokens + 1, dtype=np.int64)
    cnt_prefix[1:] = np.cumsum(known)
    target = rng.standard_normal(dim)
    return [
        ("max_window_sum", kernels.max_window_sum_numpy, kernels.max_window_sum_jit,
         (weights, 15)),
        ("extreme_pair_distance", kernels.extreme_pair_distance_numpy,
         kernels.extreme_pair_distance_jit, (pos_a, pos_b, False)),
        ("max_window_cosine", kernels.max_window_cosine_numpy,
         kernels.max_window_cosine_jit, (vec_prefix, cnt_prefix, target, 7)),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000)
    parser.add_argument("--csv", help="also write the results to this CSV file")
    args = parser.parse_args(argv)

    if not kernels.HAS_NUMBA:
        print("numba is not importable; nothing to compare", file=sys.stderr)
        return 1

    rng = np.random.default_rng(7)
    workloads = build_workloads(rng)

    # compile before timing
    for _, _, jit_fn, call_args in workloads:
        jit_fn(*call_args)

    results = []
    print(f"{'kernel':<24}{'numpy (us)':>12}{'numba (us)':>12}{'speedup':>9}")
    for name, numpy_fn, jit_fn, call_args in workloads:
        t_numpy = time_call(numpy_fn, call_args, args.repeats) * 1e6
        t_jit = time_call(jit_fn, call_args, args.repeats) * 1e6
        speedup = t_numpy / t_jit if t_jit > 0 else float("inf")
        print(f"{name:<24}{t_numpy:>12.2f}{t_jit:>12.2f}{speedup:>8.1f}x")
        results.append((name, t_numpy, t_jit, speedup))

    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["kernel", "numpy_us", "numba_us", "speedup"])
            writer.writerows(results)
    return 0


if __name__ == "__main__":
    sys.exit(main())
