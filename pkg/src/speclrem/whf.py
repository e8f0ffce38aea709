"""Wiener-Hopf factorization of matrix symbols on the unit circle.

A symbol M invertible a.e. on the circle factors as M = M_plus * D * M_minus
with D = diag(z^kappa_i), M_plus invertible-analytic inside the closed disk and
M_minus invertible-analytic outside (including infinity).  The partial indices
kappa_1 >= ... >= kappa_m are unique; the factors are recovered numerically and
certified by a sup-norm residual on a circle grid.
"""
from dataclasses import dataclass

import numpy as np

from .kernels import series_inverse_coeffs
from .laurent import (CircleSingularError, LaurentMatrix, ScalarRational,
                      lm_det, lm_eval, lm_mul, winding_number)

TOL_FACTOR = 1e-8
RESIDUAL_GRID = 512


class FactorizationError(ArithmeticError):
    """Raised when the factorization cannot be certified at the target tolerance."""


@dataclass(frozen=True)
class WHFactorization:
    """Certified factorization M = plus * diag(z^kappa) * minus."""

    kappa: tuple
    plus: LaurentMatrix
    minus: LaurentMatrix
    plus_inv: LaurentMatrix
    minus_inv: LaurentMatrix
    residual: float
    n_terms: int

    @property
    def total_index(self):
        return int(sum(self.kappa))

    @property
    def spread(self):
        return int(self.kappa[0] - self.kappa[-1])

    def middle(self):
        """The diagonal monomial factor diag(z^kappa_i) as a LaurentMatrix."""
        m = len(self.kappa)
        lo = min(self.kappa)
        c = np.zeros((max(self.kappa) - lo + 1, m, m), dtype=complex)
        for i, k in enumerate(self.kappa):
            c[k - lo, i, i] = 1.0
        return LaurentMatrix(lo, c)


def is_generic(kappa):
    """A symbol is generic when its partial indices differ by at most one."""
    return max(kappa) - min(kappa) <= 1


# -- partial indices via rectangular finite sections --------------------------

def rect_section(M, N):
    """Finite section of the Toeplitz action of M on one-sided series.

    Unknowns are the coefficients x_s, s in [-N, 0]; equations are all output
    coefficients t in [-N + min(lo, 0), 0] that the unknowns can touch, so
    truncation at the old end adds no spurious kernel vectors.
    """
    m, n = M.rows, M.cols
    lo = min(M.lo, 0)
    ts = np.arange(-N + lo, 1)
    T = np.zeros((len(ts) * m, (N + 1) * n), dtype=complex)
    T4 = T.reshape(len(ts), m, N + 1, n)
    for p in range(M.lo, M.hi + 1):
        j = p - ts
        mask = (0 <= j) & (j <= N)
        T4[np.nonzero(mask)[0], :, j[mask], :] = M.coeff(p)
    return T


def _section_kernel_dim(M, N, rel=1e-8):
    s = np.linalg.svd(rect_section(M, N), compute_uv=False)
    return int(np.sum(s < rel * max(s[0], 1e-300)))


def partial_indices(M, N=64):
    """Partial indices of a square symbol, largest first.

    The kernel dimension of the sectioned operator for the shifted symbol
    z^k M equals sum_i max(kappa_i + k, 0); first differences in k reveal the
    multiplicity of each index value.  The scan window K covers every index a
    symbol with this support can have.
    """
    m = M.rows
    if m != M.cols:
        raise ValueError("partial indices need a square symbol")
    K = m * max(M.hi - M.lo, 1) + 1

    d = {}

    def dim(k):
        if k not in d:
            d[k] = _section_kernel_dim(
                LaurentMatrix(M.lo + k, M.coeffs, trim=False), N)
        return d[k]

    # c(k) = d(k) - d(k-1) counts indices with kappa_i >= 1 - k; it is a
    # nondecreasing step profile from 0 to m, so scan outward from k = 0 and
    # stop once both ends saturate.
    c = {}
    lo_k, hi_k = 0, 1
    c[0] = dim(0) - dim(-1)
    c[1] = dim(1) - dim(0)
    while c[lo_k] > 0 and lo_k > -K - 1:
        lo_k -= 1
        c[lo_k] = dim(lo_k) - dim(lo_k - 1)
    while c[hi_k] < m and hi_k < K + 1:
        hi_k += 1
        c[hi_k] = dim(hi_k) - dim(hi_k - 1)

    def cval(k):
        if k in c:
            return c[k]
        return 0 if k < lo_k else m

    kappa = []
    for v in range(K + 1, -K - 2, -1):
        mult = cval(1 - v) - cval(-v)
        if mult < 0:
            raise FactorizationError("inconsistent kernel profile; section too small")
        kappa += [v] * mult
    if len(kappa) != m:
        raise FactorizationError("index recovery found wrong multiplicity total")
    return tuple(sorted(kappa, reverse=True))


# -- factor recovery ----------------------------------------------------------

def _row_constraint_matrix(M, kappa_i, N):
    """Linear constraints on a row y(z) = sum_{k=0..N} y_k z^k forcing the
    coefficients of (y M) at powers above kappa_i to vanish."""
    m = M.rows
    ps = range(kappa_i + 1, N + M.hi + 1)
    C = np.zeros((len(ps) * M.cols, (N + 1) * m), dtype=complex)
    for a, p in enumerate(ps):
        for k in range(N + 1):
            C[a * M.cols:(a + 1) * M.cols, k * m:(k + 1) * m] = M.coeff(p - k).T
    return C


def _shift_embed(y, d, N, m):
    out = np.zeros((N + 1, m), dtype=complex)
    out[d:] = y[:N + 1 - d]
    return out


def _build_plus_inverse(M, kappa, N, tol=1e-7):
    """Rows of Y = M_plus^{-1}, found as null directions of the row
    constraints, processed by ascending index and kept independent of the
    z^d-shifts of previously chosen rows."""
    m = M.rows
    chosen = [None] * m
    groups = {}
    for i in np.argsort(kappa):
        groups.setdefault(kappa[i], []).append(int(i))
    prev = []
    for kv in sorted(groups):
        rows = groups[kv]
        C = _row_constraint_matrix(M, kv, N)
        _, s, Vh = np.linalg.svd(C)
        ns_dim = int(np.sum(s < tol * max(s[0], 1e-300)))
        B = Vh[len(s) - ns_dim:].conj().T
        shifts = []
        for kj, yj in prev:
            for d in range(kv - kj + 1):
                shifts.append(_shift_embed(yj, d, N, m).ravel())
        if shifts:
            Q, _ = np.linalg.qr(np.array(shifts).T)
            B = B - Q @ (Q.conj().T @ B)
        Ub, sb, _ = np.linalg.svd(B, full_matrices=False)
        if len(rows) > int(np.sum(sb > 0.5)):
            raise FactorizationError("factor recovery found too few row directions")
        for a, i in enumerate(rows):
            y = Ub[:, a].reshape(N + 1, m)
            chosen[i] = y
            prev.append((kv, y))
    Yc = np.zeros((N + 1, m, m), dtype=complex)
    for i in range(m):
        Yc[:, i, :] = chosen[i]
    return LaurentMatrix(0, Yc, trim=False)


def series_inverse(A, N):
    """Truncated inverse of a power series with invertible constant term."""
    if A.lo != 0:
        raise ValueError("series inverse needs support starting at z^0")
    return LaurentMatrix(0, series_inverse_coeffs(np.ascontiguousarray(A.coeffs), N),
                         trim=False)


def factorization_residual(M, kappa, plus, minus, ngrid=RESIDUAL_GRID):
    """sup over a circle grid of |plus(z) diag(z^kappa) minus(z) - M(z)|_F."""
    from .laurent import grid_eval
    kappa = np.asarray(kappa)
    width = (plus.hi - plus.lo) + (minus.hi - minus.lo) + (M.hi - M.lo) + 1
    ngrid = max(ngrid, 1 << int(np.ceil(np.log2(4 * width + 4))))
    z = np.exp(2j * np.pi * np.arange(ngrid) / ngrid)
    Pv = grid_eval(plus, ngrid)
    Qv = grid_eval(minus, ngrid)
    Mv = grid_eval(M, ngrid)
    # scale each column i of plus by z^kappa_i, then right-multiply by minus
    D = z[:, None] ** kappa[None, :]
    diff = np.einsum("tik,tkj->tij", Pv * D[:, None, :], Qv) - Mv
    return float(np.max(np.linalg.norm(diff, axis=(1, 2))))


def _attempt(M, N, winding=None):
    kappa = partial_indices(M, N=min(N, 384))
    if winding is not None and sum(kappa) != winding:
        raise FactorizationError(
            f"index sum {sum(kappa)} disagrees with winding {winding}; "
            "finite section too small")
    m = M.rows
    Y = _build_plus_inverse(M, kappa, N)
    YM = lm_mul(Y, M)
    lo = YM.lo - max(max(kappa), 0)
    c = np.zeros((-lo + 1, m, m), dtype=complex)
    for i in range(m):
        for k in range(YM.coeffs.shape[0]):
            p = YM.lo + k - kappa[i]
            if lo <= p <= 0:
                c[p - lo, i, :] = YM.coeffs[k][i, :]
    minus = LaurentMatrix(lo, c)
    plus = series_inverse(Y, N)
    if minus.hi != 0:
        raise FactorizationError("minus factor misses its constant term")
    minus_w = LaurentMatrix(0, minus.coeffs[::-1], trim=False)
    minus_inv_w = series_inverse(minus_w, N)
    minus_inv = LaurentMatrix(-N, minus_inv_w.coeffs[::-1], trim=False)
    res = factorization_residual(M, kappa, plus, minus)
    return WHFactorization(kappa, plus, minus, Y, minus_inv, res, N)


def whf(M, n_start=64, n_max=4096, tol=TOL_FACTOR):
    """Factor a square symbol, doubling the truncation order until the
    residual certificate passes."""
    det = lm_det(M)
    if det.circle_singular:
        pts = [r for r, _ in det.zeros["on"]]
        raise CircleSingularError(
            "determinant vanishes on the unit circle", pts)
    wind = winding_number(det)
    N = n_start
    best = None
    last_err = None
    while N <= n_max:
        try:
            fact = _attempt(M, N, winding=wind)
        except FactorizationError as e:
            last_err = e
            N *= 2
            continue
        if best is None or fact.residual < best.residual:
            best = fact
        if fact.residual <= tol:
            return fact
        N *= 2
    if best is None:
        raise FactorizationError(
            f"factor recovery failed up to n_terms={n_max}: {last_err}")
    raise FactorizationError(
        f"residual {best.residual:.3e} above tolerance {tol} at n_terms={best.n_terms}")


def whf_scalar(f):
    """Exact factorization of a scalar rational, f = plus * z^kappa * minus.

    Roots and poles strictly inside the disk go to the minus factor as
    (1 - r/z) terms, those outside go to the plus factor as (1 - z/r) terms,
    and the leading constants fold into plus.
    """
    if isinstance(f, LaurentMatrix):
        f = ScalarRational(f)
    if f.circle_singular:
        pts = [r for r, _ in f.zeros["on"] + f.poles["on"]]
        raise CircleSingularError("root or pole on the unit circle", pts)
    kappa = winding_number(f)

    def split(lm, rootinfo):
        lo, c = lm.scalar_coeffs()
        c = np.trim_zeros(c, "b")
        lead = c[-1]
        plus = np.array([1.0 + 0.0j])
        minus = np.array([1.0 + 0.0j])
        const = lead
        for r, mult in rootinfo["outside"]:
            for _ in range(mult):
                # (z - r) = (-r) (1 - z/r)
                const *= -r
                plus = np.convolve(plus, [1.0, -1.0 / r])
        # each inside root contributes (z - r) = z (1 - r/z); the z factors
        # are the winding count, already in kappa, so keep (1 - r/z) only,
        # stored ascending in powers of z^{-1}
        for r, mult in rootinfo["inside"]:
            for _ in range(mult):
                minus = np.convolve(minus, [1.0, -r])
        return const, plus, minus

    cn, pn, mn = split(f.num, f.zeros)
    cd, pd, md = split(f.den, f.poles)
    plus = ScalarRational(LaurentMatrix.scalar(0, pn * (cn / cd)),
                          LaurentMatrix.scalar(0, pd))
    minus = ScalarRational(LaurentMatrix.scalar(-(len(mn) - 1), mn[::-1]),
                           LaurentMatrix.scalar(-(len(md) - 1), md[::-1]))
    return kappa, plus, minus


# -- spectral factorization ---------------------------------------------------

def bauer_minus(S, n_blocks=64, n_max=2048, tol=1e-10):
    """Bauer factorization S = W W* with W(z) = sum_{j>=0} W_j z^{-j},
    W analytic and invertible outside the open disk, W_0 lower triangular
    with positive diagonal.

    S must be a Hermitian positive Laurent matrix (S* = S on the circle).
    The block Toeplitz Cholesky rows converge geometrically; the block count
    doubles until the product matches S on a grid.
    """
    m = S.rows
    nb = n_blocks
    last_err = np.inf
    while nb <= n_max:
        T = np.zeros((nb * m, nb * m), dtype=complex)
        for i in range(nb):
            for j in range(nb):
                T[i * m:(i + 1) * m, j * m:(j + 1) * m] = S.coeff(j - i)
        try:
            L = np.linalg.cholesky(T)
        except np.linalg.LinAlgError:
            raise FactorizationError("symbol is not positive definite on the circle")
        n_keep = min(nb, S.hi - S.lo + 8)
        Wc = np.zeros((n_keep, m, m), dtype=complex)
        for j in range(n_keep):
            Wc[j] = L[(nb - 1) * m:nb * m, (nb - 1 - j) * m:(nb - j) * m]
        W = LaurentMatrix(-(n_keep - 1), Wc[::-1])
        from .laurent import lm_adjoint, sup_norm
        err = sup_norm(lm_mul(W, lm_adjoint(W)) - S)
        if err <= tol * max(sup_norm(S), 1.0):
            return W
        last_err = err
        nb *= 2
    raise FactorizationError(f"Bauer factorization stalled at error {last_err:.3e}")


def spectral_factor_plus(S, **kw):
    """S = V V* with V supported on nonnegative powers, V(0) lower triangular
    positive diagonal: run the outside factorization on S(1/z)."""
    S_flip = LaurentMatrix(-S.hi, S.coeffs[::-1])
    W = bauer_minus(S_flip, **kw)
    return LaurentMatrix(0, W.coeffs[::-1])
