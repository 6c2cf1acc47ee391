"""Timing comparison of the jit-compiled kernels against the vectorized
numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [--sizes 64,128,256] [--repeat 5]

Times the elimination kernels on dense complex matrices of each size and
prints one table row per (kernel, size) with the speedup factor.
"""

import argparse
import time

import numpy as np

from decayfact import _kernels as K


def make_input(kind, m, rng):
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    a += m * np.eye(m)  # diagonally dominant: no pivot breakdown
    if kind == "cholesky":
        a = a @ a.conj().T + m * np.eye(m)
    elif kind == "tri_lower":
        a = np.tril(a)
    elif kind == "tri_upper":
        a = np.triu(a)
    return np.ascontiguousarray(a)


PAIRS = [
    ("lu", "generic", lambda a: K.lu_numba(a, 1e-13),
     lambda a: K.lu_numpy(a, 1e-13)),
    ("cholesky", "cholesky", K.cholesky_numba, K.cholesky_numpy),
    ("qr", "generic", K.qr_numba, K.qr_numpy),
    ("tri_inv_lower", "tri_lower", K.tri_inv_lower_numba, K.tri_inv_lower_numpy),
    ("tri_inv_upper", "tri_upper", K.tri_inv_upper_numba, K.tri_inv_upper_numpy),
]


def best_of(fn, a, repeat):
    out = float("inf")
    for _ in range(repeat):
        x = a.copy()
        t0 = time.perf_counter()
        fn(x)
        out = min(out, time.perf_counter() - t0)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="64,128,256")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)

    if not K.HAVE_NUMBA:
        print("numba is not importable; the jit column reruns the fallback")
    print(f"{'kernel':<14} {'m':>5} {'numba (ms)':>12} {'numpy (ms)':>12} {'speedup':>8}")
    for name, kind, jit_fn, np_fn in PAIRS:
        for m in sizes:
            a = make_input(kind, m, rng)
            jit_fn(a.copy())  # compile outside the timed region
            t_jit = best_of(jit_fn, a, args.repeat)
            t_np = best_of(np_fn, a, args.repeat)
            print(f"{name:<14} {m:>5} {1e3 * t_jit:>12.3f} {1e3 * t_np:>12.3f} "
                  f"{t_np / t_jit:>8.2f}x")


if __name__ == "__main__":
    main()
