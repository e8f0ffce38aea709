import numpy as np

from speclrem.laurent import LaurentMatrix, lm_mul


def random_one_sided_factor(rng, m, sign, deg, rad=0.5):
    """Identity plus geometrically decaying random blocks on one side.

    The total operator norm of the non-identity part stays below 1, so the
    factor is invertible-analytic on its side of the circle and all its
    determinant roots stay safely away from the unit circle.
    """
    coeffs = [np.eye(m, dtype=complex)]
    for k in range(deg):
        A = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        A *= rad / (2 ** k) / max(np.linalg.norm(A, 2), 1e-12)
        coeffs.append(A)
    arr = np.stack(coeffs)
    if sign < 0:
        return LaurentMatrix(-deg, arr[::-1])
    return LaurentMatrix(0, arr)


def diag_monomial(kappa):
    """diag(z^kappa_i) as a LaurentMatrix."""
    m = len(kappa)
    lo = min(kappa)
    c = np.zeros((max(kappa) - lo + 1, m, m), dtype=complex)
    for i, k in enumerate(kappa):
        c[k - lo, i, i] = 1.0
    return LaurentMatrix(lo, c)


def constructed_symbol(rng, m=None, kappa=None):
    """Random symbol with known partial indices, det roots off the circle.

    Built as plus * diag(z^kappa) * minus from well-conditioned one-sided
    factors, so the true indices are the chosen kappa exactly.
    """
    if m is None:
        m = int(rng.integers(1, 4))
    if kappa is None:
        kappa = sorted(rng.integers(-2, 3, size=m).tolist(), reverse=True)
    plus = random_one_sided_factor(rng, m, +1, int(rng.integers(1, 3)))
    minus = random_one_sided_factor(rng, m, -1, int(rng.integers(1, 3)))
    M = lm_mul(lm_mul(plus, diag_monomial(kappa)), minus)
    return M, tuple(kappa)
