#!/usr/bin/env python3
"""Benchmark the numba tape kernel against the pure-numpy executor.

Times expression evaluation over sample arrays (the package's hot loop) and
two end-to-end operations that sit on top of it.  Run from the repo root:

    python benchmarks/bench_backends.py
    python benchmarks/bench_backends.py --sizes 1000 100000 --repeats 7
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from starcalc import Interval, Log, parse, product_riemann, integrate
from starcalc.backend import compile_tape, eval_tape_numba, eval_tape_numpy, set_backend

EXPRESSIONS = [
    "x",
    "log(x)",
    "x^2+3*x+1",
    "e^(1/x)",
    "x^x",
    "log(x+1)*e^(0.5*x)/sqrt(x^2+1)",
]


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_tapes(sizes, repeats):
    print(f"{'expression':40} {'n':>9} {'numpy':>12} {'numba':>12} {'speedup':>8}")
    for src in EXPRESSIONS:
        tape = compile_tape(parse(src))
        for n in sizes:
            xs = np.linspace(0.1, 2.0, n)
            eval_tape_numba(tape, xs)  # trigger JIT before timing
            t_np = best_of(lambda: eval_tape_numpy(tape, xs), repeats)
            t_nb = best_of(lambda: eval_tape_numba(tape, xs), repeats)
            print(
                f"{src:40} {n:>9} {t_np * 1e3:>10.3f}ms {t_nb * 1e3:>10.3f}ms "
                f"{t_np / t_nb:>7.2f}x"
            )


def bench_operations(repeats):
    print()
    print(f"{'operation':40} {'backend':>9} {'time':>12}")
    riemann_f = parse("x")
    logf = Log(parse("e^(0.5*x)*(x+1)"))
    for backend in ("numpy", "numba"):
        set_backend(backend)
        from starcalc import compile_evaluator

        fn = compile_evaluator(riemann_f)
        fn(np.array([0.5]))  # warm the kernel
        t = best_of(
            lambda: product_riemann(fn, Interval(0.0, 1.0), 1_000_000), repeats
        )
        print(f"{'product_riemann n=1e6':40} {backend:>9} {t * 1e3:>10.3f}ms")
        g = compile_evaluator(logf)
        t = best_of(lambda: integrate(g, Interval(0.0, 2.0)), repeats)
        print(f"{'tanh-sinh integrate(log f)':40} {backend:>9} {t * 1e3:>10.3f}ms")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[1_000, 100_000, 1_000_000])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    bench_tapes(args.sizes, args.repeats)
    bench_operations(args.repeats)


if __name__ == "__main__":
    main()
