"""Benchmark the accelerated kernels against the pure-numpy fallbacks.

Run directly:  python benchmarks/bench_kernels.py
The package picks its path from SPECLREM_NO_NUMBA at import time; this script
times both implementations in one process so the comparison is like-for-like.
"""
import time

import numpy as np

from speclrem import kernels


def _time(fn, *args, repeat=5):
    fn(*args)  # warm (JIT compile / cache touch)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    print(f"numba path available: {kernels.USE_NUMBA}")
    rows = []

    for nblk, mdim in ((64, 2), (256, 8)):
        a = rng.standard_normal((nblk, mdim, mdim)) \
            + 1j * rng.standard_normal((nblk, mdim, mdim))
        b = rng.standard_normal((nblk, mdim, mdim)) \
            + 1j * rng.standard_normal((nblk, mdim, mdim))
        rows.append((f"conv_blocks {nblk}x{mdim}x{mdim}",
                     _time(kernels._conv_blocks_np, a, b),
                     _time(kernels.conv_blocks, a, b)
                     if kernels.USE_NUMBA else None))

    s = rng.standard_normal((8, 6, 6)) * 0.1 + 0j
    s[0] += 3 * np.eye(6)
    rows.append(("series_inverse n=512",
                 _time(kernels._series_inverse_np, s, 512),
                 _time(kernels.series_inverse_coeffs, s, 512)
                 if kernels.USE_NUMBA else None))

    knum = rng.standard_normal((400, 4096)) + 1j * rng.standard_normal((400, 4096))
    kden = knum + 3.0
    target = np.abs(rng.standard_normal(4096)) + 0.1
    logdet = rng.standard_normal(400)
    rows.append(("scalar_surface 400x4096",
                 _time(kernels._scalar_surface_np, knum, kden, target, logdet),
                 _time(kernels.scalar_surface, knum, kden, target, logdet)
                 if kernels.USE_NUMBA else None))

    print(f"{'kernel':28s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, tn, tb in rows:
        if tb is None:
            print(f"{name:28s} {tn * 1e3:9.2f}ms {'n/a':>10s}")
        else:
            print(f"{name:28s} {tn * 1e3:9.2f}ms {tb * 1e3:9.2f}ms "
                  f"{tn / tb:7.1f}x")


if __name__ == "__main__":
    main()
