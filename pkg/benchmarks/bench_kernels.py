#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs each hot kernel on representative workload shapes and prints a timing
table plus the speedup. Also verifies on every shape that the two paths
return bitwise-identical results, which is the contract that makes the
LATENTNLP_NUMBA=0 fallback safe.

Usage: python benchmarks/bench_kernels.py [--repeats 3]
"""

import argparse
import time

import numpy as np

from latentnlp import kernels

if not kernels.NUMBA_AVAILABLE:
    raise SystemExit(
        "numba path unavailable (LATENTNLP_NUMBA=0 or numba missing); "
        "nothing to compare"
    )


def timed(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def equal(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def bench_knn(rng, repeats):
    rows = []
    for n, d, k in [(2000, 2, 3), (2000, 50, 10), (1000, 300, 3), (5000, 8, 5)]:
        points = rng.standard_normal((n, d))
        queries = rng.standard_normal((n, d))
        exclude = np.full(n, -1, dtype=np.int64)
        kernels._knn_select_numba(points[:10], queries[:10], k, exclude[:10])  # warm
        t_nb, out_nb = timed(kernels._knn_select_numba, points, queries, k, exclude,
                             repeats=repeats)
        t_np, out_np = timed(kernels._knn_select_numpy, points, queries, k, exclude,
                             repeats=repeats)
        rows.append((f"knn n={n} d={d} k={k}", t_nb, t_np, equal(out_nb, out_np)))
    return rows


def bench_assign(rng, repeats):
    rows = []
    for n, d, kc in [(20000, 8, 40), (5000, 300, 30)]:
        points = rng.standard_normal((n, d))
        centroids = rng.standard_normal((kc, d))
        kernels._assign_nearest_numba(points[:10], centroids)  # warm
        t_nb, out_nb = timed(kernels._assign_nearest_numba, points, centroids,
                             repeats=repeats)
        t_np, out_np = timed(kernels._assign_nearest_numpy, points, centroids,
                             repeats=repeats)
        rows.append((f"assign n={n} d={d} k={kc}", t_nb, t_np, equal(out_nb, out_np)))
    return rows


def bench_levenshtein(rng, repeats):
    pairs = [
        (rng.integers(0, 26, 200).astype(np.int64),
         rng.integers(0, 26, 220).astype(np.int64))
        for _ in range(50)
    ]
    kernels._levenshtein_numba(pairs[0][0][:5], pairs[0][1][:5])  # warm

    def run(fn):
        return [fn(a, b) for a, b in pairs]

    t_nb, out_nb = timed(run, kernels._levenshtein_numba, repeats=repeats)
    t_np, out_np = timed(run, kernels._levenshtein_numpy, repeats=repeats)
    return [("levenshtein 50x(200,220)", t_nb, t_np, out_nb == out_np)]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    rows = []
    rows += bench_knn(rng, args.repeats)
    rows += bench_assign(rng, args.repeats)
    rows += bench_levenshtein(rng, args.repeats)

    width = max(len(r[0]) for r in rows)
    print(f"{'workload':<{width}}  {'numba':>9}  {'numpy':>9}  {'speedup':>8}  identical")
    for name, t_nb, t_np, same in rows:
        print(f"{name:<{width}}  {t_nb * 1e3:>7.1f}ms  {t_np * 1e3:>7.1f}ms"
              f"  {t_np / t_nb:>7.1f}x  {same}")
    if not all(r[3] for r in rows):
        raise SystemExit("paths disagree; the fallback contract is broken")


if __name__ == "__main__":
    main()
