#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Times the two hot kernels on realistic workloads:
  1. dp_step     one sweep of the lattice max-of-expectations operator
  2. gheat_march explicit march of the variance-uncertainty heat equation

Both backends are imported directly, so the comparison is independent of
the GEXLAB_BACKEND selection.  Results must agree bitwise: the numba
kernels perform the identical arithmetic per grid point.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes N,N,...] [--repeats R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gexlab import _kernels

N_ATOMS = 5
N_LAWS = 3
MARCH_STEPS = 200


def make_dp_inputs(size: int, rng: np.random.Generator):
    values = rng.normal(size=size + 4)
    law_ptr = np.arange(0, N_LAWS * N_ATOMS + 1, N_ATOMS, dtype=np.int64)
    law_k = np.tile(np.arange(-2, 3, dtype=np.int64), N_LAWS)
    weights = rng.uniform(0.05, 1.0, size=(N_LAWS, N_ATOMS))
    law_p = (weights / weights.sum(axis=1, keepdims=True)).ravel()
    return values, law_ptr, law_k, law_p, 2, size


def make_march_inputs(size: int, rng: np.random.Generator):
    xs = np.linspace(-6.0, 6.0, size)
    u = xs * xs + 0.1 * rng.normal(size=size)
    return u, 0.2, 0.05, MARCH_STEPS


def time_call(fn, args, repeats: int) -> float:
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernel(name, fn_numpy, fn_numba, make_inputs, sizes, repeats, rng):
    print(f"\n{name}")
    print(f"{'size':>10s} {'numpy (ms)':>12s} {'numba (ms)':>12s} {'speedup':>8s} {'bitwise':>8s}")
    for size in sizes:
        args = make_inputs(size, rng)
        out_np = fn_numpy(*args)
        agree = "n/a"
        line_numba = f"{'-':>12s} {'-':>8s}"
        t_np = time_call(fn_numpy, args, repeats)
        if fn_numba is not None:
            fn_numba(*args)  # JIT warm-up outside the timed region
            out_nb = fn_numba(*args)
            agree = "yes" if _same(out_np, out_nb) else "NO"
            t_nb = time_call(fn_numba, args, repeats)
            line_numba = f"{t_nb * 1e3:>12.3f} {t_np / t_nb:>7.1f}x"
        print(f"{size:>10d} {t_np * 1e3:>12.3f} {line_numba} {agree:>8s}")


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return a[0] == b[0] and np.array_equal(a[1], b[1])
    return np.array_equal(a, b)


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def main() -> None:
    parser = argparse.ArgumentParser(description="Benchmark gexlab kernels")
    parser.add_argument(
        "--sizes", type=_int_list, default=[10_000, 100_000, 1_000_000],
        help="comma-separated grid sizes (default: 10000,100000,1000000)",
    )
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats, min is kept")
    parser.add_argument("--seed", type=int, default=0, help="input seed")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"backend selected at import: {_kernels.BACKEND}")
    if not _kernels._HAS_NUMBA:
        print("numba unavailable: timing the numpy fallback only")

    bench_kernel(
        "dp_step (one operator sweep, 3 laws x 5 atoms)",
        _kernels.dp_step_numpy,
        _kernels.dp_step_numba,
        make_dp_inputs,
        args.sizes,
        args.repeats,
        rng,
    )
    bench_kernel(
        f"gheat_march ({MARCH_STEPS} explicit time steps)",
        _kernels.gheat_march_numpy,
        _kernels.gheat_march_numba,
        make_march_inputs,
        args.sizes,
        args.repeats,
        rng,
    )


if __name__ == "__main__":
    main()
