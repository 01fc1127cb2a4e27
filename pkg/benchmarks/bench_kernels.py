"""Time the hot kernels on both backends and check they agree.

    python3 benchmarks/bench_kernels.py [--depth 1000000] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from subseries_lab import kernels
from subseries_lab.fn32 import N_NONTOTAL, _sweep_tables


def cases(depth):
    n = np.arange(1, depth + 1)
    terms = np.where(n % 2 == 1, 1.0, -1.0) / n
    evens = n % 2 == 0
    odd_w = np.where(n % 2 == 1, 1.0 / n, 0.0)
    sweep = (N_NONTOTAL, *_sweep_tables())
    return {
        "cumsum": (terms,),
        "greedy": (terms, evens, evens),
        "cutpoints": (odd_w, 0, 8, 1.0),
        "fn32_sweep": sweep,
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype.kind == "f":
        return np.allclose(a, b, rtol=0, atol=1e-12)
    return np.array_equal(a, b)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--depth", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"depth={args.depth} repeat={args.repeat}")
    print(f"{'kernel':<12}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}  agree")
    for name, a in cases(args.depth).items():
        py = getattr(kernels, f"{name}_numpy")
        jt = getattr(kernels, f"{name}_numba")
        t_py = min(timeit.repeat(lambda: py(*a), number=1, repeat=args.repeat))
        if jt is None:
            print(f"{name:<12}{t_py:>12.4f}{'n/a':>12}")
            continue
        jt(*a)  # compile outside the timing
        t_jt = min(timeit.repeat(lambda: jt(*a), number=1, repeat=args.repeat))
        print(f"{name:<12}{t_py:>12.4f}{t_jt:>12.4f}{t_py / t_jt:>10.1f}  {same(py(*a), jt(*a))}")


if __name__ == "__main__":
    main()
