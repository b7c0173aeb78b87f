"""Compare the numba and numpy kernel-fill paths.

Usage:
    python benchmarks/bench_kernels.py [--sizes 129,257,513,1025] [--repeats 5]

The two implementations are required to agree bit for bit, so this is a
pure speed comparison of the grid fill used by kernel_to_matrix.
"""

import argparse
import time

import numpy as np

from pseudoherm import step_potential
from pseudoherm import _backend
from pseudoherm.wavekernel import _antider_knots


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="129,257,513,1025")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    v = step_potential()
    knots = _antider_knots(v)
    if not _backend.USING_NUMBA:
        print("numba unavailable or disabled; timing the numpy path only")
    else:
        _backend.warmup()

    print(f"{'N':>6} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for n in sizes:
        xs = np.linspace(-4.0, 4.0, n)
        t_np = best_of(
            lambda: _backend.q1_matrix_numpy(xs, xs, v.breakpoints, knots, v.values),
            args.repeats,
        )
        if _backend.USING_NUMBA:
            t_nb = best_of(
                lambda: _backend.q1_matrix_numba(xs, xs, v.breakpoints, knots, v.values),
                args.repeats,
            )
            a = _backend.q1_matrix_numpy(xs, xs, v.breakpoints, knots, v.values)
            b = _backend.q1_matrix_numba(xs, xs, v.breakpoints, knots, v.values)
            assert np.array_equal(a, b), "backend outputs diverged"
            print(f"{n:>6} {t_np * 1e3:>10.2f}ms {t_nb * 1e3:>10.2f}ms {t_np / t_nb:>8.1f}x")
        else:
            print(f"{n:>6} {t_np * 1e3:>10.2f}ms {'-':>12} {'-':>9}")


if __name__ == "__main__":
    main()
