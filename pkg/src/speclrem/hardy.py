"""The one-sided series calculus for white-noise driven models.

Elements of the prediction space are matrix series supported on nonpositive
powers of z.  The shift V maps f to the nonpositive part of z f, its right
inverse multiplies by z^(-1), and a symbol M acts by multiply-then-truncate.
"""
import numpy as np

from .laurent import LaurentMatrix, l2_inner, lm_adjoint, lm_mul


class HardyElement:
    """A LaurentMatrix constrained to powers s <= 0, with a certified bound on
    any mass discarded by truncation."""

    __slots__ = ("series", "tail_bound")

    def __init__(self, series, tail_bound=0.0):
        if series.hi > 0:
            raise ValueError("support extends above z^0; use project_minus")
        self.series = series
        self.tail_bound = float(tail_bound)

    @property
    def rows(self):
        return self.series.rows

    @property
    def cols(self):
        return self.series.cols

    def coeff(self, s):
        return self.series.coeff(s)

    def __add__(self, other):
        return HardyElement(self.series + other.series,
                            self.tail_bound + other.tail_bound)

    def __sub__(self, other):
        return HardyElement(self.series - other.series,
                            self.tail_bound + other.tail_bound)

    def __mul__(self, scalar):
        return HardyElement(self.series * scalar, abs(scalar) * self.tail_bound)

    __rmul__ = __mul__

    def __repr__(self):
        return (f"HardyElement(support [{self.series.lo},{self.series.hi}], "
                f"shape {self.series.shape}, tail={self.tail_bound:.1e})")


def project_minus(f, tail_bound=0.0):
    """Keep the coefficients with s <= 0."""
    if isinstance(f, HardyElement):
        return f
    if f.hi <= 0:
        return HardyElement(f, tail_bound)
    n_keep = -f.lo + 1
    if n_keep <= 0:
        return HardyElement(LaurentMatrix.zero(f.rows, f.cols), tail_bound)
    return HardyElement(LaurentMatrix(f.lo, f.coeffs[:n_keep]), tail_bound)


def _as_series(f):
    return f.series if isinstance(f, HardyElement) else f


def op_V(f):
    """Shift all powers up by one, then truncate above z^0.

    Under white noise this kills constants: V(1) = 0.
    """
    g = _as_series(f).shift(1)
    tb = f.tail_bound if isinstance(f, HardyElement) else 0.0
    return project_minus(g, tb)


def op_Vinv(f):
    """Multiply by z^(-1); an isometry into the space, right inverse of op_V."""
    g = _as_series(f).shift(-1)
    tb = f.tail_bound if isinstance(f, HardyElement) else 0.0
    return HardyElement(g, tb)


def apply_symbol(M, f):
    """The Toeplitz action of a symbol: multiply by M(z), keep powers s <= 0."""
    g = _as_series(f)
    if M.cols != g.rows:
        raise ValueError(f"dimension mismatch: symbol cols {M.cols}, element rows {g.rows}")
    tb = f.tail_bound if isinstance(f, HardyElement) else 0.0
    amp = float(np.sum(np.linalg.norm(M.coeffs, axis=(1, 2))))
    return project_minus(lm_mul(M, g), amp * tb)


def inner(f, g):
    """The prediction-space inner product; reduces to coefficient sums for
    white noise."""
    return l2_inner(_as_series(f), _as_series(g))


def adjoint_symbol(M):
    return lm_adjoint(M)


def toeplitz_oracle(M, N):
    """Dense matrix of the truncated symbol action on coefficients s in [-N, 0].

    Block (i, j) equals the Fourier coefficient M_{j-i}, so row block i holds
    output coefficient z^(-i) and column block j input coefficient z^(-j).
    The oracle matches apply_symbol exactly on the newest N - (hi - lo) blocks;
    the oldest blocks see truncation effects.
    """
    if N < 4 * (M.hi - M.lo):
        raise ValueError("oracle window too small for symbol support")
    m, n = M.rows, M.cols
    T = np.zeros(((N + 1) * m, (N + 1) * n), dtype=complex)
    for i in range(N + 1):
        for j in range(N + 1):
            T[i * m:(i + 1) * m, j * n:(j + 1) * n] = M.coeff(j - i)
    return T


def coeff_vector(f, N):
    """Stack coefficients z^0, z^(-1), ..., z^(-N) of a one-sided element."""
    g = _as_series(f)
    out = np.zeros(((N + 1) * g.rows, g.cols), dtype=complex)
    for i in range(N + 1):
        out[i * g.rows:(i + 1) * g.rows] = g.coeff(-i)
    return out


def from_coeff_vector(v, rows, N):
    """Inverse of coeff_vector: rebuild the series from stacked coefficients."""
    v = np.asarray(v, dtype=complex)
    cols = 1 if v.ndim == 1 else v.shape[1]
    v = v.reshape((N + 1) * rows, cols)
    c = np.zeros((N + 1, rows, cols), dtype=complex)
    for i in range(N + 1):
        c[N - i] = v[i * rows:(i + 1) * rows]
    return LaurentMatrix(-N, c)
