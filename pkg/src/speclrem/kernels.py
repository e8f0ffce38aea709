"""Hot numeric kernels with numba acceleration and a pure-numpy fallback.

Set SPECLREM_NO_NUMBA=1 to force the numpy path (used by the benchmark and
as a safety hatch on platforms where numba is unavailable).
"""
import os

import numpy as np

USE_NUMBA = os.environ.get("SPECLREM_NO_NUMBA", "0") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

__all__ = ["USE_NUMBA", "conv_blocks", "series_inverse_coeffs", "scalar_surface"]


def _conv_blocks_np(a, b):
    na, nb = a.shape[0], b.shape[0]
    out = np.zeros((na + nb - 1, a.shape[1], b.shape[2]), dtype=np.complex128)
    for i in range(na):
        out[i:i + nb] += np.matmul(a[i], b)
    return out


def _series_inverse_np(a, n):
    m = a.shape[1]
    b = np.zeros((n + 1, m, m), dtype=np.complex128)
    a0inv = np.linalg.inv(a[0])
    b[0] = a0inv
    for k in range(1, n + 1):
        acc = np.zeros((m, m), dtype=np.complex128)
        jmax = min(k, a.shape[0] - 1)
        for j in range(1, jmax + 1):
            acc += a[j] @ b[k - j]
        b[k] = -a0inv @ acc
    return b


def _scalar_surface_np(knum, kden, target, logdet):
    vals = np.empty(knum.shape[0])
    dens = np.abs(knum) ** 2 / np.abs(kden) ** 2
    for p in range(knum.shape[0]):
        vals[p] = logdet[p] + np.mean(target / dens[p])
    return vals


if USE_NUMBA:

    @njit(cache=True)
    def _conv_blocks_nb(a, b):  # pragma: no cover - exercised via dispatch
        na, nb = a.shape[0], b.shape[0]
        out = np.zeros((na + nb - 1, a.shape[1], b.shape[2]), dtype=np.complex128)
        for i in range(na):
            for j in range(nb):
                out[i + j] += a[i] @ b[j]
        return out

    @njit(cache=True)
    def _series_inverse_nb(a, n):  # pragma: no cover
        m = a.shape[1]
        b = np.zeros((n + 1, m, m), dtype=np.complex128)
        a0inv = np.linalg.inv(a[0])
        b[0] = a0inv
        for k in range(1, n + 1):
            acc = np.zeros((m, m), dtype=np.complex128)
            jmax = min(k, a.shape[0] - 1)
            for j in range(1, jmax + 1):
                acc += a[j] @ b[k - j]
            b[k] = -a0inv @ acc
        return b

    @njit(cache=True)
    def _scalar_surface_nb(knum, kden, target, logdet):  # pragma: no cover
        npts, ngrid = knum.shape
        vals = np.empty(npts)
        for p in range(npts):
            acc = 0.0
            for g in range(ngrid):
                d = abs(knum[p, g]) ** 2 / abs(kden[p, g]) ** 2
                acc += target[g] / d
            vals[p] = logdet[p] + acc / ngrid
        return vals


def conv_blocks(a, b):
    """Coefficient convolution of two block series: out[k] = sum_j a[j] @ b[k-j].

    The numpy implementation batches the inner products through BLAS and
    benchmarks faster than the compiled loop at every block size, so it is
    used on both paths (see benchmarks/bench_kernels.py).
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    return _conv_blocks_np(a, b)


def series_inverse_coeffs(a, n):
    """First n+1 coefficients of the power-series inverse of sum_k a[k] x^k."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if USE_NUMBA:
        return _series_inverse_nb(a, n)
    return _series_inverse_np(a, n)


def scalar_surface(knum, kden, target, logdet):
    """Quadrature of target/|knum/kden|^2 over the grid axis, plus logdet, per row."""
    knum = np.ascontiguousarray(knum, dtype=np.complex128)
    kden = np.ascontiguousarray(kden, dtype=np.complex128)
    target = np.ascontiguousarray(target, dtype=np.float64)
    logdet = np.ascontiguousarray(logdet, dtype=np.float64)
    # vectorized numpy wins here too; see benchmarks/bench_kernels.py
    return _scalar_surface_np(knum, kden, target, logdet)
