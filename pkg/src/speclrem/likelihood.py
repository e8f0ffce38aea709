"""Limiting and finite-sample Gaussian likelihoods on the unit circle.

The limiting objective is log det of the Wold leading coefficient plus the
quadrature of trace{(KK*)^{-1} Xi Xi*}; the finite-sample version builds the
banded block-Toeplitz covariance and evaluates the exact Gaussian criterion.
Closed-form references for the example families are evaluated by residue
calculus and serve as oracles for the numeric path.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .kernels import scalar_surface, series_inverse_coeffs
from .laurent import GRID_N, LaurentMatrix, grid_eval, lm_adjoint, lm_mul
from .whf import FactorizationError, bauer_minus

TOL_RIDGE = 1e-6
TAIL_TOL = 1e-12


class BoundaryError(ArithmeticError):
    """K is (numerically) non-invertible on the unit circle."""


# -- transfer functions -------------------------------------------------------

class TransferFunction:
    """m x r matrix of rational functions with all supports in powers <= 0.

    Each entry is a pair (num, den) of scalar Laurent polynomials in z^(-1)
    with den nonzero at infinity; polynomial entries have den = 1.
    """

    def __init__(self, entries):
        self.entries = entries
        self.m = len(entries)
        self.r = len(entries[0])
        for row in entries:
            for num, den in row:
                if num.hi > 0 or den.hi > 0:
                    raise ValueError("transfer entries must live in powers <= 0")
                if abs(den.coeff(0)[0, 0]) < 1e-14:
                    raise ValueError("entry denominator vanishes at infinity")

    @staticmethod
    def from_laurent(lm):
        one = LaurentMatrix.scalar(0, [1.0])
        ent = [[(LaurentMatrix(lm.lo, lm.coeffs[:, i:i + 1, j:j + 1]), one)
                for j in range(lm.cols)] for i in range(lm.rows)]
        return TransferFunction(ent)

    @staticmethod
    def scalar(num, den=None):
        one = LaurentMatrix.scalar(0, [1.0])
        return TransferFunction([[(num, den if den is not None else one)]])

    @property
    def shape(self):
        return (self.m, self.r)

    def is_polynomial(self):
        return all(den.hi == den.lo == 0 for row in self.entries for _, den in row)

    def grid_values(self, n=GRID_N):
        out = np.empty((n, self.m, self.r), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, (num, den) in enumerate(row):
                nv = grid_eval(num, n)[:, 0, 0]
                if den.hi == den.lo == 0:
                    out[:, i, j] = nv / den.coeff(0)[0, 0]
                else:
                    out[:, i, j] = nv / grid_eval(den, n)[:, 0, 0]
        return out

    def value_at_inf(self):
        out = np.empty((self.m, self.r), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, (num, den) in enumerate(row):
                out[i, j] = num.coeff(0)[0, 0] / den.coeff(0)[0, 0]
        return out

    def series(self, tol=TAIL_TOL, n_max=4096):
        """Truncated one-sided expansion as a LaurentMatrix, tail below tol."""
        cols = []
        for i, row in enumerate(self.entries):
            for j, (num, den) in enumerate(row):
                cols.append((i, j, _entry_series(num, den, tol, n_max)))
        lo = min(c.lo for _, _, c in cols)
        out = np.zeros((-lo + 1, self.m, self.r), dtype=complex)
        for i, j, c in cols:
            for k in range(c.coeffs.shape[0]):
                out[c.lo + k - lo, i, j] = c.coeffs[k, 0, 0]
        return LaurentMatrix(lo, out)


def _entry_series(num, den, tol, n_max):
    if den.hi == den.lo == 0:
        return num * (1.0 / den.coeff(0)[0, 0])
    # expand in w = z^{-1}: num(w) * den(w)^{-1} as a power series
    dw = den.coeffs[::-1].copy()  # coeff of w^k = coeff of z^{-k}
    n = 64
    while True:
        inv = series_inverse_coeffs(dw, n)[:, 0, 0]
        tail = np.abs(inv[-8:]).sum()
        if tail < tol or n >= n_max:
            break
        n *= 2
    prod = np.convolve(num.coeffs[::-1, 0, 0], inv)[:n + 1]
    return LaurentMatrix.scalar(-n, prod[::-1])


# -- Wold / outer factors -----------------------------------------------------

def outer_factor(K):
    """A Wold-admissible factor with the same spectral density as K.

    Scalar path: zeros of K in |z| > 1 (equivalently |w| < 1 in w = z^(-1))
    are reflected across the circle by Blaschke factors, preserving |K| on
    the circle.  Matrix path: one-sided spectral factorization of KK*.
    """
    if K.shape == (1, 1):
        num, den = K.entries[0][0]
        # ascending coefficients in w = z^{-1}; a leading w^j factor is a zero
        # at the origin whose Blaschke reflection is the constant 1, so it is
        # simply dropped (|w|^j = 1 on the circle)
        w_coeffs = np.concatenate([np.zeros(-num.hi, dtype=complex),
                                   num.coeffs[::-1, 0, 0]])
        w_coeffs = np.trim_zeros(w_coeffs, "f")
        w_coeffs = np.trim_zeros(w_coeffs, "b")
        if len(w_coeffs) == 0:
            raise BoundaryError("zero transfer function")
        roots = np.roots(w_coeffs[::-1]) if len(w_coeffs) > 1 else np.array([])
        if np.any(np.abs(np.abs(roots) - 1.0) < TOL_RIDGE):
            raise BoundaryError("transfer function zero on the unit circle")
        out = np.array([w_coeffs[-1]], dtype=complex)
        for rt in roots:
            if abs(rt) < 1.0:
                # (w - rt) -> |rt| (w - 1/conj(rt)), same modulus on the circle
                out = np.convolve(out, [-abs(rt) / np.conj(rt), abs(rt)])
            else:
                out = np.convolve(out, [-rt, 1.0])
        tnum = LaurentMatrix.scalar(-(len(out) - 1), out[::-1])
        return TransferFunction.scalar(tnum, den)
    S = _density(K)
    W = bauer_minus(S, tol=1e-11)
    return TransferFunction.from_laurent(W)


def _density(K):
    lm = K.series()
    return lm_mul(lm, lm_adjoint(lm))


# -- limiting likelihood ------------------------------------------------------

def limiting_likelihood(K, Xi, n=GRID_N, ridge_tol=TOL_RIDGE):
    """log det(Ktilde(inf) Ktilde(inf)*) + mean over the circle grid of
    trace{(K K*)^{-1} Xi Xi*}."""
    Kv = K.grid_values(n)
    # the ridge check needs only the order of magnitude of the smallest
    # singular value, so a coarse subsample of the grid suffices
    sv = np.linalg.svd(Kv[:: max(1, n // 512)], compute_uv=False)
    if sv[:, -1].min() < ridge_tol:
        raise BoundaryError("K is within ridge tolerance of non-invertibility")
    # log det of the Wold leading coefficient equals the circle average of
    # log det(KK*) (the outer factor has no zeros outside the disk, so its
    # log-determinant is harmonic there and the mean value property applies)
    Xv = Xi.grid_values(n)
    m = Kv.shape[1]
    if m == 1:
        k2 = np.abs(Kv[:, 0, 0]) ** 2
        logdet = float(np.mean(np.log(k2)))
        tr = np.sum(np.abs(Xv[:, 0, :]) ** 2, axis=1) / k2
        return float(logdet + tr.mean())
    if m == 2:
        a, b = Kv[:, 0, 0], Kv[:, 0, 1]
        c, d = Kv[:, 1, 0], Kv[:, 1, 1]
        detK2 = np.abs(a * d - b * c) ** 2
        logdet = float(np.mean(np.log(detK2)))
        XX = Xv @ np.conj(np.transpose(Xv, (0, 2, 1)))
        # trace(adj(KK*) XX*) / det(KK*) with KK* Hermitian 2x2
        s11 = np.abs(a) ** 2 + np.abs(b) ** 2
        s22 = np.abs(c) ** 2 + np.abs(d) ** 2
        s12 = a * np.conj(c) + b * np.conj(d)
        tr = (s22 * XX[:, 0, 0].real + s11 * XX[:, 1, 1].real
              - 2.0 * (s12 * XX[:, 1, 0]).real) / detK2
        return float(logdet + tr.mean())
    logdet = float(np.mean(2.0 * np.log(np.abs(np.linalg.det(Kv)))))
    KK = Kv @ np.conj(np.transpose(Kv, (0, 2, 1)))
    XX = Xv @ np.conj(np.transpose(Xv, (0, 2, 1)))
    tr = np.trace(np.linalg.solve(KK, XX), axis1=1, axis2=2).real
    return float(logdet + tr.mean())


# -- closed-form references ---------------------------------------------------

def _residue_mean(num, den):
    """Exact circle average of a rational num/den (scalar Laurents): the sum
    of residues of num(z)/(z den(z)) inside the open disk.

    Assumes the denominator's nonzero roots are simple, which holds off the
    boundary sets of the reference families.
    """
    a, nc = num.scalar_coeffs()
    b, dc = den.scalar_coeffs()
    nc, dc = np.trim_zeros(nc, "b"), np.trim_zeros(dc, "b")
    npoly = np.polynomial.Polynomial(nc)
    dpoly = np.polynomial.Polynomial(dc)
    # f(z)/z = z^(a-b-1) n(z)/d(z)
    shift = a - b - 1
    total = 0.0 + 0.0j
    roots = dpoly.roots() if len(dc) > 1 else np.array([])
    for rt in roots:
        if abs(rt) < 1.0 - 1e-12:
            if np.min(np.abs(roots[roots != rt] - rt)) < 1e-8 if len(roots) > 1 else False:
                raise ArithmeticError("repeated denominator root in residue path")
            total += rt ** shift * npoly(rt) / dpoly.deriv()(rt)
    if shift < 0:
        # pole at the origin of order -shift: Taylor coefficient of n/d
        k = -shift
        g = series_inverse_coeffs(dc[:, None, None], k)[:, 0, 0]
        taylor = np.convolve(nc, g)[:k]
        if len(taylor) >= k:
            total += taylor[k - 1]
    return complex(total)


def _abs2(lm):
    """|f|^2 on the circle as a Laurent polynomial: f times its conjugate flip."""
    return lm_mul(lm, lm_adjoint(lm))


def _cagan_K_num_den(beta, psi):
    num = LaurentMatrix.scalar(-1, [-1.0 / beta, psi])
    den = LaurentMatrix.scalar(-1, [-1.0 / beta, 1.0])
    return num, den


def reference_likelihood(name, theta_true, theta):
    """Closed-form limiting likelihood for the example families, independent
    of the numeric quadrature path.  Parameters must be off the boundary
    sets (|beta| = 1, |beta psi| = 1, theta = 0 seams handled per branch)."""
    if name == "cagan":
        (b0, p0), (b, p) = theta_true, theta
        _check_off_boundary(abs(b0) != 1 and abs(b) != 1 and
                            (abs(b) < 1 or abs(b * p) != 1))
        if abs(b) < 1:
            if abs(b0) < 1:
                return 1.0
            n0, d0 = _cagan_K_num_den(b0, p0)
            return float(_residue_mean(_abs2(n0), _abs2(d0)).real)
        # integrand |den_K / num_K|^2 * truth density
        nK, dK = _cagan_K_num_den(b, p)
        if abs(b0) < 1:
            inum, iden = _abs2(dK), _abs2(nK)
        else:
            n0, d0 = _cagan_K_num_den(b0, p0)
            inum = lm_mul(_abs2(dK), _abs2(n0))
            iden = lm_mul(_abs2(nK), _abs2(d0))
        integral = _residue_mean(inum, iden).real
        logdet = np.log(p ** 2) if abs(b * p) >= 1 else np.log(b ** -2)
        return float(logdet + integral)
    if name == "cagan-regularized":
        b0, b = theta_true, theta
        _check_off_boundary(abs(b0) != 1 and abs(b) != 1)
        if abs(b) < 1:
            return 1.0 if abs(b0) < 1 else b0 ** -2
        return float(np.log(b ** -2) +
                     (b ** 2 if abs(b0) < 1 else b ** 2 / b0 ** 2))
    if name == "nongeneric":
        t0, t = theta_true, theta
        if t0 == 0:
            return 1.0 if t == 0 else t ** -2 + 1 + t ** 2
        if t == 0:
            return t0 ** -2 + 1 + t0 ** 2
        return t ** 2 * (1 + t0 ** -2) - 2 * t * t0 + t0 ** 2 * (1 + t ** -2)
    if name == "nongeneric-regularized":
        # polynomial 2x2 entries with unit |det K|^2: the trace integrand is a
        # Laurent polynomial, so the exact mean is its central coefficient
        t0, t = theta_true, theta
        K = _nongeneric_reg_transfer(t)
        Xi = _nongeneric_reg_transfer(t0)
        Ks = K.series()
        KK = lm_mul(Ks, lm_adjoint(Ks))
        XX = lm_mul(Xi.series(), lm_adjoint(Xi.series()))
        det, adj = _det_adj_2x2(KK)
        if abs(det.coeff(0)[0, 0] - 1.0) > 1e-12 or det.hi != 0 or det.lo != 0:
            raise ArithmeticError("expected unit determinant spectral density")
        quad = lm_mul(adj, XX)
        tr = (quad.coeff(0)[0, 0] + quad.coeff(0)[1, 1]).real
        # the Wold factor is triangular with diagonal entries whose squared
        # product is exactly one, so the log-det term vanishes
        return float(tr)
    raise KeyError(f"unknown reference family: {name}")


def _det_adj_2x2(A):
    a = LaurentMatrix(A.lo, A.coeffs[:, 0:1, 0:1])
    b = LaurentMatrix(A.lo, A.coeffs[:, 0:1, 1:2])
    c = LaurentMatrix(A.lo, A.coeffs[:, 1:2, 0:1])
    d = LaurentMatrix(A.lo, A.coeffs[:, 1:2, 1:2])
    det = lm_mul(a, d) - lm_mul(b, c)
    adj = LaurentMatrix.stack_rows([
        _hcat(d, -1.0 * b), _hcat(-1.0 * c, a)])
    return det, adj


def _hcat(x, y):
    lo = min(x.lo, y.lo)
    hi = max(x.hi, y.hi)
    c = np.zeros((hi - lo + 1, 1, 2), dtype=complex)
    c[x.lo - lo:x.hi - lo + 1, :, 0:1] = x.coeffs
    c[y.lo - lo:y.hi - lo + 1, :, 1:2] = y.coeffs
    return LaurentMatrix(lo, c)


def _check_off_boundary(ok):
    if not ok:
        raise BoundaryError("parameter on a likelihood boundary set")


# -- model families -----------------------------------------------------------

def family_transfer(name, theta):
    """K(theta) for the builtin likelihood families."""
    if name == "cagan":
        beta, psi = theta
        if abs(beta) < 1:
            return TransferFunction.scalar(LaurentMatrix.scalar(0, [1.0]))
        num, den = _cagan_K_num_den(beta, psi)
        return TransferFunction.scalar(num, den)
    if name == "cagan-regularized":
        beta = theta if np.isscalar(theta) else theta[0]
        if abs(beta) < 1:
            return TransferFunction.scalar(LaurentMatrix.scalar(0, [1.0]))
        num = LaurentMatrix.scalar(-1, [-1.0 / beta, 1.0 / beta ** 2])
        den = LaurentMatrix.scalar(-1, [-1.0 / beta, 1.0])
        return TransferFunction.scalar(num, den)
    if name == "nongeneric":
        t = theta if np.isscalar(theta) else theta[0]
        if t == 0:
            c = np.zeros((3, 2, 2), dtype=complex)
            c[0, 0, 0] = 1.0
            c[2, 1, 1] = 1.0
            return TransferFunction.from_laurent(LaurentMatrix(-2, c))
        c = np.zeros((3, 2, 2), dtype=complex)
        c[0, 0, 0] = 1.0
        c[1, 0, 1] = 1.0 / t
        c[1, 1, 0] = -t
        return TransferFunction.from_laurent(LaurentMatrix(-2, c))
    if name == "nongeneric-regularized":
        t = theta if np.isscalar(theta) else theta[0]
        return _nongeneric_reg_transfer(t)
    raise KeyError(f"unknown family: {name}")


def _nongeneric_reg_transfer(t):
    c = np.zeros((3, 2, 2), dtype=complex)
    c[0, 0, 0] = 1.0
    c[1, 0, 1] = t / (1.0 + t ** 2)
    c[1, 1, 0] = -t
    c[2, 1, 1] = 1.0 / (1.0 + t ** 2)
    return TransferFunction.from_laurent(LaurentMatrix(-2, c))


FAMILY_PARAMS = {
    "cagan": ("beta", "psi"),
    "cagan-regularized": ("beta",),
    "nongeneric": ("theta",),
    "nongeneric-regularized": ("theta",),
}


# -- autocovariances and the finite-sample criterion --------------------------

def autocovariances(K, J):
    """gamma_j = circle mean of z^j K K* for j = 0..J, by exact coefficient
    convolution of the truncated series."""
    if J < 0:
        raise ValueError("J must be nonnegative")
    lm = K if isinstance(K, LaurentMatrix) else K.series()
    cov = lm_mul(lm, lm_adjoint(lm))
    return [cov.coeff(-j) for j in range(J + 1)]


def finite_sample_likelihood(K, x, cutoff=1e-14):
    """(1/T) log det Sigma_T + (1/T) x' Sigma_T^{-1} x for the block-Toeplitz
    covariance built from the autocovariances of K.

    The autocovariances decay geometrically, so Sigma_T is treated as banded
    beyond the cutoff and factored with a banded Cholesky.
    """
    x = np.asarray(x)
    if x.ndim == 1:
        x = x[:, None]
    T, m = x.shape
    lm = K if isinstance(K, LaurentMatrix) else K.series()
    cov = lm_mul(lm, lm_adjoint(lm))
    gammas = []
    for j in range(T):
        g = cov.coeff(-j)
        if np.linalg.norm(g) < cutoff and j > 0:
            break
        gammas.append(g)
    J = len(gammas) - 1
    if np.max(np.abs(np.imag([g for g in gammas]))) < 1e-12:
        gammas = [g.real for g in gammas]
        xv = x.reshape(-1).real
        dt = float
    else:
        xv = x.reshape(-1)
        dt = complex
    n = T * m
    bw = (J + 1) * m - 1
    ab = np.zeros((bw + 1, n), dtype=dt)
    for a in range(min(J + 1, T)):  # block sub-diagonal a
        g = gammas[a]
        for p in range(m):
            for q in range(m):
                k = a * m + p - q
                if k < 0:
                    continue
                cols = np.arange(q, n - a * m - p + q, m)
                cols = cols[cols + k < n]
                ab[k, cols] = g[p, q]
    try:
        c = scipy.linalg.cholesky_banded(ab, lower=True)
    except np.linalg.LinAlgError as e:
        raise ArithmeticError("covariance not positive definite") from e
    logdet = 2.0 * np.sum(np.log(c[0].real))
    y = scipy.linalg.cho_solve_banded((c, True), xv)
    quad = np.real(np.conj(xv) @ y)
    return float((logdet + quad) / T)


# -- simulation ---------------------------------------------------------------

@dataclass
class SimConfig:
    T: int
    seed: int = 0
    replications: int = 1
    burn_in: int = 0
    S: int = None
    tail_tol: float = 1e-8


def simulate_paths(Xi, cfg):
    """Moving-average paths X_t = sum_s Xi_s zeta_{t-s} with standardized
    Gaussian innovations from a counter-based generator; replicate k uses the
    substream keyed by (seed, k)."""
    lm = Xi if isinstance(Xi, LaurentMatrix) else Xi.series(tol=cfg.tail_tol)
    S = cfg.S
    if S is None:
        S = -lm.lo
    tail = np.linalg.norm(lm.coeffs[:max(-lm.lo - S, 0)].ravel()) if -lm.lo > S else 0.0
    if tail > cfg.tail_tol:
        raise ValueError(f"impulse-response tail {tail:.2e} above tolerance")
    m, r = lm.rows, lm.cols
    H = np.zeros((S + 1, m, r))
    for s in range(S + 1):
        H[s] = lm.coeff(-s).real
    n_eps = cfg.T + cfg.burn_in + S
    out = np.empty((cfg.replications, cfg.T, m))
    for rep in range(cfg.replications):
        rng = np.random.Generator(np.random.Philox(key=(cfg.seed, rep)))
        zeta = rng.standard_normal((n_eps, r))
        path = np.zeros((cfg.T + cfg.burn_in, m))
        for s in range(S + 1):
            seg = zeta[S - s:n_eps - s]
            path += seg @ H[s].T
        out[rep] = path[cfg.burn_in:]
    return out


# -- surfaces and scans -------------------------------------------------------

@dataclass
class LikelihoodSurface:
    family: str
    param_names: tuple
    points: np.ndarray  # (P, d)
    values: np.ndarray  # (P,)
    flags: list
    minima: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def _eval_point(family, theta, Xi, n):
    try:
        K = family_transfer(family, theta)
        return limiting_likelihood(K, Xi, n=n), ""
    except BoundaryError as e:
        return np.nan, f"boundary: {e}"


def scan(family, grids, theta_true, n=GRID_N, polish=True):
    """Evaluate the limiting likelihood over a rectangular parameter grid for
    one of the builtin families, then polish each grid-local minimum with a
    simplex search.

    grids maps parameter names (in FAMILY_PARAMS order) to 1-D arrays.
    """
    names = FAMILY_PARAMS[family]
    axes = [np.asarray(grids[nm], dtype=float) for nm in names]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    Xi = family_transfer(_truth_family(family), _as_theta(family, theta_true))
    shape = tuple(len(a) for a in axes)
    vals = np.empty(len(pts))
    flags = []
    use_fast = family in ("cagan", "cagan-regularized")
    if use_fast:
        vals, flags = _scan_scalar(family, pts, Xi, n)
    else:
        for idx, p in enumerate(pts):
            vals[idx], flag = _eval_point(family, _as_theta(family, p), Xi, n)
            flags.append(flag)
    surface = LikelihoodSurface(family, names, pts, vals, flags,
                                meta={"n_grid": n, "theta_true": theta_true})
    if polish:
        surface.minima = _polish_minima(family, axes, vals.reshape(shape), Xi, n)
    return surface


def _truth_family(family):
    return family


def _as_theta(family, p):
    p = np.atleast_1d(p)
    return tuple(p) if len(p) > 1 else float(p[0])


def _scan_scalar(family, pts, Xi, n):
    """Vectorized scalar-family scan through the surface kernel: per point,
    grid values of the K numerator/denominator plus the Wold log-det term."""
    Xv = Xi.grid_values(n)[:, 0, 0]
    target = np.abs(Xv) ** 2
    P = len(pts)
    knum = np.empty((P, n), dtype=complex)
    kden = np.empty((P, n), dtype=complex)
    logdet = np.empty(P)
    flags = [""] * P
    ok = np.ones(P, dtype=bool)
    for i, p in enumerate(pts):
        theta = _as_theta(family, p)
        try:
            K = family_transfer(family, theta)
            num, den = K.entries[0][0]
            knum[i] = grid_eval(num, n)[:, 0, 0]
            kden[i] = grid_eval(den, n)[:, 0, 0]
            if np.min(np.abs(knum[i] / kden[i])) < TOL_RIDGE:
                raise BoundaryError("ridge proximity")
            Kt = outer_factor(K)
            logdet[i] = np.log(abs(Kt.value_at_inf()[0, 0]) ** 2)
        except BoundaryError as e:
            ok[i] = False
            flags[i] = f"boundary: {e}"
    vals = np.full(P, np.nan)
    if ok.any():
        vals[ok] = scalar_surface(knum[ok], kden[ok], target, logdet[ok])
    return vals, flags


def _polish_minima(family, axes, grid_vals, Xi, n):
    """Locate grid-local minima and refine each with Nelder-Mead."""
    shape = grid_vals.shape
    candidates = []
    flat = grid_vals
    for idx in np.ndindex(shape):
        v = flat[idx]
        if not np.isfinite(v):
            continue
        is_min = True
        for d in range(len(shape)):
            for step in (-1, 1):
                j = list(idx)
                j[d] += step
                if 0 <= j[d] < shape[d]:
                    w = flat[tuple(j)]
                    if np.isfinite(w) and w < v:
                        is_min = False
        if is_min:
            candidates.append(idx)

    def objective(p):
        val, _ = _eval_point(family, _as_theta(family, p), Xi, n)
        return val if np.isfinite(val) else 1e12

    # Confine the polish to the scanned box so flat valleys at the grid edge
    # cannot drag the simplex off to infinity.
    bounds = [(float(a.min()), float(a.max())) for a in axes]
    minima = []
    for idx in candidates:
        x0 = np.array([axes[d][idx[d]] for d in range(len(shape))])
        res = scipy.optimize.minimize(objective, x0, method="Nelder-Mead",
                                      bounds=bounds,
                                      options={"xatol": 1e-8, "fatol": 1e-12,
                                               "maxiter": 2000})
        minima.append({"point": res.x.copy(), "value": float(res.fun),
                       "start": x0})
    # deduplicate
    dedup = []
    for cand in sorted(minima, key=lambda d: d["value"]):
        if all(np.linalg.norm(cand["point"] - d["point"]) > 1e-4 for d in dedup):
            dedup.append(cand)
    return dedup
