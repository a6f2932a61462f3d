"""Time each kernel compiled and as plain Python on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Outputs of both paths are compared before timing is reported.  With
WIGNERWALKS_NUMBA=0 both columns run the Python body.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from wignerwalks import kernels
from wignerwalks._accel import JIT_ENABLED, python_impl
from wignerwalks.dyck import catalan
from wignerwalks.walks import count_even_walks


def _dyck(fn, s):
    out = np.zeros((catalan(s), 2 * s), np.uint8)
    hist = np.zeros(s + 1, np.int64)
    fn(s, out, hist)
    return out, hist


def _walks(fn, s):
    pre = np.zeros(0, np.int64)
    out = np.zeros((count_even_walks(s), 2 * s + 1), np.int64)
    fn(s, pre, out)
    return (out,)


def _index(fn, s, n):
    hist = np.zeros((2, (s + 1) ** s), np.int64)
    fn(s, n, hist)
    return (hist,)


CASES = [
    ("dyck_scan s=10", kernels.dyck_scan, _dyck, (10,)),
    ("even_walk_scan s=5", kernels.even_walk_scan, _walks, (5,)),
    ("index_sum_histogram s=3 n=6", kernels.index_sum_histogram, _index, (3, 6)),
]


def best_of(repeat, run, fn, args):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = run(fn, *args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    print(f"jit enabled: {JIT_ENABLED}")
    print(f"{'kernel':32s} {'jit [s]':>10s} {'python [s]':>11s} {'speedup':>8s}")
    for name, fn, run, params in CASES:
        run(fn, *params)  # compile outside the timed region
        t_jit, r_jit = best_of(args.repeat, run, fn, params)
        t_py, r_py = best_of(1, run, python_impl(fn), params)
        for a, b in zip(r_jit, r_py):
            if not np.array_equal(a, b):
                raise SystemExit(f"{name}: compiled and python outputs differ")
        print(f"{name:32s} {t_jit:10.4f} {t_py:11.4f} {t_py / t_jit:8.1f}x")


if __name__ == "__main__":
    main()
