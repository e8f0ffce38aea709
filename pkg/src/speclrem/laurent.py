"""Matrix Laurent polynomials and scalar rationals on the unit circle.

Coefficients are complex double precision.  A LaurentMatrix stores the finite
Fourier support [lo, hi] as a contiguous block of coefficient matrices; terms
whose Frobenius norm falls below DROP_TOL are pruned so supports stay tight
after convolutions.
"""
import numpy as np

from .kernels import conv_blocks

DROP_TOL = 1e-13
TOL_CIRCLE = 1e-9
GRID_N = 4096


class CircleSingularError(ValueError):
    """Raised when an operation requires a symbol with no roots/poles on the circle."""

    def __init__(self, message, points=()):
        super().__init__(message)
        self.points = tuple(points)


class LaurentMatrix:
    """Finite two-sided matrix Fourier series sum_s M_s z^s.

    coeffs[k] is the coefficient of z^(lo+k), an (rows x cols) complex matrix.
    Instances are immutable; all operations return new objects.
    """

    __slots__ = ("lo", "coeffs")

    def __init__(self, lo, coeffs, trim=True):
        c = np.array(coeffs, dtype=complex)
        if c.ndim == 2:
            c = c[None]
        if c.ndim != 3:
            raise ValueError("coeffs must be (terms, rows, cols)")
        lo = int(lo)
        if trim:
            norms = np.linalg.norm(c.reshape(c.shape[0], -1), axis=1)
            keep = np.nonzero(norms > DROP_TOL)[0]
            if len(keep) == 0:
                lo, c = 0, np.zeros((1,) + c.shape[1:], dtype=complex)
            else:
                lo += int(keep[0])
                c = c[keep[0]:keep[-1] + 1]
        c.setflags(write=False)
        self.lo = lo
        self.coeffs = c

    # -- construction helpers -------------------------------------------------
    @staticmethod
    def constant(mat):
        return LaurentMatrix(0, np.asarray(mat, dtype=complex)[None])

    @staticmethod
    def identity(m):
        return LaurentMatrix.constant(np.eye(m))

    @staticmethod
    def zero(rows, cols):
        return LaurentMatrix(0, np.zeros((1, rows, cols)), trim=False)

    @staticmethod
    def scalar(lo, coeffs):
        """1x1 Laurent polynomial from a 1-D coefficient array."""
        c = np.asarray(coeffs, dtype=complex)
        return LaurentMatrix(lo, c[:, None, None])

    @staticmethod
    def monomial(s, mat):
        return LaurentMatrix(s, np.asarray(mat, dtype=complex)[None])

    # -- basic queries --------------------------------------------------------
    @property
    def hi(self):
        return self.lo + self.coeffs.shape[0] - 1

    @property
    def rows(self):
        return self.coeffs.shape[1]

    @property
    def cols(self):
        return self.coeffs.shape[2]

    @property
    def shape(self):
        return (self.rows, self.cols)

    def coeff(self, s):
        k = s - self.lo
        if 0 <= k < self.coeffs.shape[0]:
            return self.coeffs[k]
        return np.zeros((self.rows, self.cols), dtype=complex)

    def is_zero(self):
        return bool(np.all(np.abs(self.coeffs) <= DROP_TOL))

    def scalar_coeffs(self):
        if self.shape != (1, 1):
            raise ValueError("not a scalar symbol")
        return self.lo, self.coeffs[:, 0, 0].copy()

    # -- algebra --------------------------------------------------------------
    def __add__(self, other):
        other = _as_lm(other, self.shape)
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        c = np.zeros((hi - lo + 1, self.rows, self.cols), dtype=complex)
        c[self.lo - lo:self.hi - lo + 1] += self.coeffs
        c[other.lo - lo:other.hi - lo + 1] += other.coeffs
        return LaurentMatrix(lo, c)

    def __sub__(self, other):
        return self + (_as_lm(other, self.shape) * (-1.0))

    def __mul__(self, scalar):
        return LaurentMatrix(self.lo, self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other):
        return lm_mul(self, other)

    def shift(self, k):
        """Multiply by z^k."""
        return LaurentMatrix(self.lo + int(k), self.coeffs, trim=False)

    def row(self, i):
        return LaurentMatrix(self.lo, self.coeffs[:, i:i + 1, :])

    def column(self, j):
        return LaurentMatrix(self.lo, self.coeffs[:, :, j:j + 1])

    def stack_rows(blocks):
        lo = min(b.lo for b in blocks)
        hi = max(b.hi for b in blocks)
        rows = sum(b.rows for b in blocks)
        cols = blocks[0].cols
        c = np.zeros((hi - lo + 1, rows, cols), dtype=complex)
        r = 0
        for b in blocks:
            c[b.lo - lo:b.hi - lo + 1, r:r + b.rows, :] = b.coeffs
            r += b.rows
        return LaurentMatrix(lo, c)

    def __repr__(self):
        return f"LaurentMatrix(lo={self.lo}, hi={self.hi}, shape={self.shape})"


def _as_lm(x, shape):
    if isinstance(x, LaurentMatrix):
        return x
    x = complex(x)
    return LaurentMatrix.constant(x * np.eye(shape[0], shape[1]))


def lm_mul(a, b):
    """Pointwise product (A B)(z) = A(z) B(z) via coefficient convolution."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return LaurentMatrix(a.lo + b.lo, conv_blocks(a.coeffs, b.coeffs))


def lm_adjoint(a):
    """A*(z) = sum_s A_s^H z^(-s); equals the conjugate transpose of A(z) on the circle."""
    c = np.conj(np.transpose(a.coeffs[::-1], (0, 2, 1)))
    return LaurentMatrix(-a.hi, c, trim=False)


def lm_eval(a, z):
    """Evaluate at a unit-circle point by split Horner on nonneg/neg powers."""
    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-12:
        raise ValueError(f"evaluation point off the unit circle: |z|={abs(z)}")
    out = np.zeros((a.rows, a.cols), dtype=complex)
    # Horner over descending powers, then apply z^lo.
    for k in range(a.coeffs.shape[0] - 1, -1, -1):
        out = out * z + a.coeffs[k]
    return out * z ** a.lo


class UnitCircleGrid:
    """Equispaced unit-circle points z_k = exp(2 pi i k / N) with cached symbol values.

    N must be a power of two and at least 4*(hi-lo)+4 for any symbol evaluated
    on it (evaluation raises otherwise).
    """

    def __init__(self, n=GRID_N):
        n = int(n)
        if n & (n - 1):
            raise ValueError("grid size must be a power of two")
        self.n = n
        self.points = np.exp(2j * np.pi * np.arange(n) / n)
        self._cache = {}

    def eval(self, a):
        """Values of a LaurentMatrix at all grid points, shape (N, rows, cols)."""
        key = (a.lo, a.coeffs.shape, hash(a.coeffs.tobytes()))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.n < 4 * (a.hi - a.lo) + 4:
            raise ValueError("grid too coarse for symbol support")
        buf = np.zeros((self.n, a.rows, a.cols), dtype=complex)
        for k in range(a.coeffs.shape[0]):
            buf[(a.lo + k) % self.n] += a.coeffs[k]
        vals = np.fft.ifft(buf, axis=0) * self.n
        if len(self._cache) > 256:
            self._cache.clear()
        self._cache[key] = vals
        return vals

    def quad(self, values):
        """Mean over the grid: the trapezoid rule for the normalized measure."""
        return np.mean(values, axis=0)


_default_grid = UnitCircleGrid(GRID_N)


def grid_eval(a, n=GRID_N):
    if n == _default_grid.n:
        return _default_grid.eval(a)
    return UnitCircleGrid(n).eval(a)


def sup_norm(a, n=GRID_N):
    """Max Frobenius norm of A(z) over the grid (a certified lower bound)."""
    vals = grid_eval(a, n)
    return float(np.max(np.linalg.norm(vals, axis=(1, 2))))


def l2_inner(a, b):
    """<A, B> = sum_s trace(A_s B_s^H), the H-inner product for white noise."""
    if a.shape != b.shape:
        raise ValueError("dimension mismatch in inner product")
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    acc = 0.0 + 0.0j
    for s in range(lo, hi + 1):
        acc += np.sum(a.coeff(s) * np.conj(b.coeff(s)))
    return complex(acc)


def l2_norm(a):
    return float(np.sqrt(max(l2_inner(a, a).real, 0.0)))


def lm_det(a):
    """Determinant as a ScalarRational, by evaluation at roots of unity and inverse DFT.

    The support is certified from the row supports: det lives in
    [m*lo, m*hi] so m*(hi-lo)+1 samples suffice.
    """
    if a.rows != a.cols:
        raise ValueError("determinant of a non-square symbol")
    m = a.rows
    if m == 1:
        return ScalarRational(LaurentMatrix(a.lo, a.coeffs))
    span = m * (a.hi - a.lo)
    n = 1
    while n < span + 1 or n < 4:
        n *= 2
    zs = np.exp(2j * np.pi * np.arange(n) / n)
    dets = np.empty(n, dtype=complex)
    for k, z in enumerate(zs):
        dets[k] = np.linalg.det(lm_eval(a, z))
    # det(z) = z^(m*lo) * p(z) with deg p <= span
    p_vals = dets * zs ** (-m * a.lo)
    p = np.fft.fft(p_vals) / n  # coefficients of p in ascending powers mod n
    coeffs = p[:span + 1]
    return ScalarRational(LaurentMatrix.scalar(m * a.lo, coeffs))


# -- scalar rationals ---------------------------------------------------------

def _cluster_roots(roots, rel=1e-7):
    """Group near-identical roots into (value, multiplicity) pairs."""
    out = []
    used = np.zeros(len(roots), dtype=bool)
    for i, r in enumerate(roots):
        if used[i]:
            continue
        close = np.abs(roots - r) <= rel * (1.0 + abs(r))
        close &= ~used
        used |= close
        group = roots[close]
        out.append((complex(np.mean(group)), int(np.sum(close))))
    return out


def _poly_roots(lm):
    """Roots of the polynomial part of a scalar Laurent polynomial (z^lo cleared)."""
    lo, c = lm.scalar_coeffs()
    c = np.trim_zeros(c, "b")
    if len(c) <= 1:
        return []
    r = np.roots(c[::-1])
    return _cluster_roots(r)


class ScalarRational:
    """Ratio of two scalar Laurent polynomials with certified root lists.

    Root lists are split by modulus relative to the unit circle at TOL_CIRCLE;
    a nonempty on-circle list marks the object circle-singular.
    """

    def __init__(self, num, den=None):
        if not isinstance(num, LaurentMatrix):
            num = LaurentMatrix.scalar(0, np.atleast_1d(num))
        if den is None:
            den = LaurentMatrix.scalar(0, [1.0])
        elif not isinstance(den, LaurentMatrix):
            den = LaurentMatrix.scalar(0, np.atleast_1d(den))
        if num.shape != (1, 1) or den.shape != (1, 1):
            raise ValueError("ScalarRational needs 1x1 numerator and denominator")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.identically_zero = num.is_zero()
        self.num = num
        self.den = den
        self.zeros = _split_circle(_poly_roots(num))
        self.poles = _split_circle(_poly_roots(den))
        self._self_check()

    def _self_check(self):
        rng = np.random.default_rng(7)
        for _ in range(3):
            z = np.exp(2j * np.pi * rng.random())
            direct_n = lm_eval(self.num, z)[0, 0]
            fact_n = self._factored_eval(self.num, self.zeros, z)
            scale = max(abs(direct_n), 1e-30)
            if abs(direct_n - fact_n) > 1e-10 * scale:
                raise ArithmeticError("root certification failed for numerator")

    @staticmethod
    def _factored_eval(lm, split, z):
        lo, c = lm.scalar_coeffs()
        c = np.trim_zeros(c, "b")
        lead = c[-1] if len(c) else 0.0
        val = lead * z ** (lo + len(c) - 1)
        for r, mult in split["inside"] + split["on"] + split["outside"]:
            val *= (1.0 - r / z) ** mult
        return val

    @property
    def circle_singular(self):
        return bool(self.identically_zero
                    or self.zeros["on"] or self.poles["on"])

    def eval(self, z):
        return lm_eval(self.num, z)[0, 0] / lm_eval(self.den, z)[0, 0]

    def winding_budget(self):
        """(num_lo + #zeros inside) - (den_lo + #poles inside)."""
        nz = sum(m for _, m in self.zeros["inside"])
        np_ = sum(m for _, m in self.poles["inside"])
        return (self.num.lo + nz) - (self.den.lo + np_)

    def __repr__(self):
        return (f"ScalarRational(num support [{self.num.lo},{self.num.hi}], "
                f"den support [{self.den.lo},{self.den.hi}])")


def _split_circle(pairs):
    split = {"inside": [], "on": [], "outside": []}
    for r, mult in pairs:
        d = abs(r) - 1.0
        if abs(d) <= TOL_CIRCLE:
            split["on"].append((r, mult))
        elif d < 0:
            split["inside"].append((r, mult))
        else:
            split["outside"].append((r, mult))
    return split


def _phase_winding(vals):
    ang = np.unwrap(np.angle(np.concatenate([vals, vals[:1]])))
    return (ang[-1] - ang[0]) / (2 * np.pi)


def winding_number(f, n=GRID_N):
    """Winding number of a circle-regular scalar rational around the origin.

    Counts zeros minus poles inside the open disk from the certified root
    lists and cross-checks by discrete phase unwrapping; the two must agree.
    """
    if isinstance(f, LaurentMatrix):
        f = ScalarRational(f)
    if f.circle_singular:
        pts = [r for r, _ in f.zeros["on"] + f.poles["on"]]
        raise CircleSingularError(f"root or pole on the unit circle: {pts}", pts)
    by_roots = f.winding_budget()
    vals = grid_eval(f.num, n)[:, 0, 0] / grid_eval(f.den, n)[:, 0, 0]
    by_phase = _phase_winding(vals)
    if abs(by_phase - by_roots) > 0.25:
        raise ArithmeticError(
            f"winding cross-check failed: roots give {by_roots}, phase gives {by_phase:.3f}")
    return int(by_roots)
