#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy fallback.

Times the two hot loops on representative workloads: the draw-averaged
rate accumulation over a power-split grid, and batched modulo encoding.
Run from the repository root:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

import rsthp._kernels_py as kpy

try:
    import rsthp._kernels_cy as kcy
except ImportError:
    kcy = None


def time_call(fn, *args, repeats=7):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_asr(K=8, n_err=100, n_grid=20, n_instances=50, seed=0):
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(n_instances):
        a2 = rng.random((n_err, K)) * 2
        s2 = rng.random((n_err, K))
        num = rng.random(K) * 3
        lhat = rng.random(K) + 0.5
        inv_l2 = 1.0 / lhat**2
        grid = np.linspace(0.0, 0.95, n_grid)
        cases.append((a2, s2, num, inv_l2, float(inv_l2.sum()), grid))

    def run(mod):
        for args in cases:
            mod.asr_accumulate(*args, 100.0, 1.0, False)
            mod.asr_accumulate(*args, 100.0, 1.0, True)

    return run


def bench_encode(K=8, n=20000):
    rng = np.random.default_rng(1)
    B = np.tril(rng.standard_normal((K, K)) + 1j * rng.standard_normal((K, K)), -1) + np.eye(K)
    B = np.ascontiguousarray(B, dtype=np.complex128)
    s = np.ascontiguousarray(
        ((rng.integers(0, 2, (n, K)) * 2 - 1) + 1j * (rng.integers(0, 2, (n, K)) * 2 - 1))
        / np.sqrt(2)
    )
    lam = 2 * np.sqrt(2)

    def run(mod):
        mod.thp_encode_batch(s, B, lam)

    return run


def main():
    workloads = [
        (
            "asr_accumulate (K=4, 50 draws, 20-point grid, 200 instances x 2 schemes)",
            bench_asr(K=4, n_err=50, n_instances=200),
        ),
        ("asr_accumulate (K=8, 100 draws, 20-point grid, 50 instances x 2 schemes)", bench_asr()),
        ("thp_encode_batch (K=8, 20000 symbol vectors)", bench_encode()),
    ]
    print(f"{'workload':<70} {'numpy':>10} {'cython':>10} {'speedup':>8}")
    for name, run in workloads:
        t_py = time_call(run, kpy)
        if kcy is None:
            print(f"{name:<70} {t_py * 1e3:>8.2f}ms {'n/a':>10} {'n/a':>8}")
            continue
        t_cy = time_call(run, kcy)
        print(f"{name:<70} {t_py * 1e3:>8.2f}ms {t_cy * 1e3:>8.2f}ms {t_py / t_cy:>7.1f}x")
    if kcy is None:
        print("\ncompiled extension unavailable; build it with `pip install -e .`")


if __name__ == "__main__":
    main()
