#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure numpy fallback.

Times the raw non-central-series kernels on a synthetic workload and one
end-to-end Monte Carlo cdf estimate per lane, and reports the speedup.

    python benchmarks/bench_kernels.py [--evals 1000000] [--samples 200000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from mvgamma import CorrelationMatrix, MvGammaParams, RngStream, ShapeParameter, cdf_mc, kernels


def time_call(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(n_evals: int):
    gen = np.random.default_rng(12345)
    y = gen.gamma(shape=2.0, scale=4.0, size=n_evals)  # spread like MC quadratic forms
    rows = []
    for name in kernels.available_backends():
        kernels.use_backend(name)
        t_cdf = time_call(lambda: kernels.nc_cdf_array(0.75, 3.1, y))
        t_pdf = time_call(lambda: kernels.nc_pdf_array(0.75, 3.1, y))
        rows.append((name, t_cdf, t_pdf))
    return rows


def bench_estimator(samples: int):
    r = CorrelationMatrix(
        [[1.0, 0.5, 0.3], [0.5, 1.0, 0.4], [0.3, 0.4, 1.0]]
    )
    params = MvGammaParams(ShapeParameter(1.5), r)
    rows = []
    for name in kernels.available_backends():
        kernels.use_backend(name)
        est = {}

        def run():
            est["e"] = cdf_mc(params, [1.0, 1.0, 1.0], samples, RngStream(42))

        t = time_call(run, repeats=2)
        rows.append((name, t, est["e"].value))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--evals", type=int, default=1_000_000, help="kernel workload size")
    ap.add_argument("--samples", type=int, default=200_000, help="end-to-end MC sample count")
    args = ap.parse_args()

    initial = kernels.backend_name()
    print(f"available backends: {', '.join(kernels.available_backends())}\n")

    rows = bench_kernels(args.evals)
    print(f"kernel timings ({args.evals:,} evaluations, best of 3):")
    print(f"  {'backend':<10} {'nc_cdf_array':>14} {'nc_pdf_array':>14}")
    for name, t_cdf, t_pdf in rows:
        print(f"  {name:<10} {t_cdf:>12.3f} s {t_pdf:>12.3f} s")
    if len(rows) == 2:
        print(f"  speedup    {rows[1][1] / rows[0][1]:>12.2f} x {rows[1][2] / rows[0][2]:>12.2f} x")

    rows = bench_estimator(args.samples)
    print(f"\nend-to-end cdf_mc (n=3, {args.samples:,} samples, best of 2):")
    for name, t, value in rows:
        print(f"  {name:<10} {t:>12.3f} s   estimate {value:.6f}")
    if len(rows) == 2:
        print(f"  speedup    {rows[1][1] / rows[0][1]:>12.2f} x")

    kernels.use_backend(initial)


if __name__ == "__main__":
    main()
