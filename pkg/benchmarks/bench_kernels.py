#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs each hot kernel on realistic single-day inputs (22200 one-second
slots by default) and reports best-of-N wall times plus the speedup of
the compiled extension. Also cross-checks that both backends produce
identical results on the benchmark inputs before timing them.

Usage: python3 benchmarks/bench_kernels.py [--slots N] [--lags N]
       [--days N] [--repeat K]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from xresponse._kernels import HAS_COMPILED, _fallback

if HAS_COMPILED:
    from xresponse._kernels import _speedups
else:
    _speedups = None


def make_inputs(slots: int, n_lags: int, rng):
    prices = np.round(100 + np.cumsum(rng.normal(0, 0.01, size=slots)), 2)
    eps_i = rng.integers(-1, 2, size=slots).astype(np.int8)
    eps_j = rng.integers(-1, 2, size=slots).astype(np.int8)
    logm = np.log(prices)
    lags = np.unique(np.rint(np.geomspace(1, slots // 2, n_lags))).astype(np.int64)
    return prices, logm, eps_i, eps_j, lags


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def check_equal(name, a, b):
    # integer outputs must match exactly; float sums may differ in the last
    # bits because the fallback uses numpy's pairwise summation while the
    # compiled loop accumulates sequentially
    for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
        x = np.asarray(x)
        y = np.asarray(y)
        if x.dtype.kind in "iub":
            ok = np.array_equal(x, y)
        else:
            ok = np.allclose(x, y, rtol=1e-12, atol=1e-300, equal_nan=True)
        if not ok:
            raise SystemExit(f"backend mismatch in {name}")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--slots", type=int, default=22200)
    ap.add_argument("--lags", type=int, default=34)
    ap.add_argument("--days", type=int, default=5, help="repetitions folded into one timing unit")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(1234)
    prices, logm, eps_i, eps_j, lags = make_inputs(args.slots, args.lags, rng)

    cases = {
        "tick_rule_signs": lambda mod: lambda: [
            mod.tick_rule_signs(prices) for _ in range(args.days)
        ],
        "lagged_product_sums": lambda mod: lambda: [
            mod.lagged_product_sums(logm, eps_j, lags, False) for _ in range(args.days)
        ],
        "sign_product_sums": lambda mod: lambda: [
            mod.sign_product_sums(eps_i, eps_j, lags, False) for _ in range(args.days)
        ],
    }

    print(f"slots={args.slots} lags={len(lags)} unit={args.days} day(s) best-of-{args.repeat}")
    print(f"{'kernel':<22}{'python [ms]':>14}{'compiled [ms]':>16}{'speedup':>10}")
    for name, make in cases.items():
        py = best_of(make(_fallback), args.repeat) * 1e3
        if _speedups is not None:
            check_equal(
                name,
                make(_fallback)()[0],
                make(_speedups)()[0],
            )
            cy = best_of(make(_speedups), args.repeat) * 1e3
            print(f"{name:<22}{py:>14.2f}{cy:>16.2f}{py / cy:>9.1f}x")
        else:
            print(f"{name:<22}{py:>14.2f}{'n/a':>16}{'n/a':>10}")
    if _speedups is None:
        print("compiled extension not available; showing fallback only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
