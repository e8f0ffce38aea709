"""Model specification, classification, and stationary solution sets.

A model is a finite system sum_s M_s(theta) E_t X_{t+s} = forcing, with
coefficient matrices affine in a named parameter vector.  Classification asks
whether the symbol's partial indices permit a unique stationary solution, a
solution family, or none; the solution set carries the particular transfer
function and the sunspot kernel basis.
"""
from dataclasses import dataclass, field

import numpy as np

from .hardy import HardyElement, apply_symbol, inner, project_minus
from .laurent import (DROP_TOL, LaurentMatrix, lm_det, lm_eval, lm_mul,
                      winding_number)
from .whf import whf

TOL_RANK = 1e-8


@dataclass
class WhiteNoise:
    r: int


@dataclass
class RationalDriver:
    """Colored driver with spectral density Gamma Gamma*; upsilon is a left
    inverse of gamma on the circle."""
    gamma: LaurentMatrix
    upsilon: LaurentMatrix

    @property
    def r(self):
        return self.gamma.cols


@dataclass
class ModelSpec:
    """Coefficient template M_s(theta) = base_s + sum_k theta_k * linear_{s,k}."""

    name: str
    m: int
    n: int
    terms: list  # of (power, base (m x n), {param: (m x n)})
    params: dict  # name -> default value
    driver: object = None
    forcing: LaurentMatrix = None

    def __post_init__(self):
        if self.driver is None:
            self.driver = WhiteNoise(self.n)
        if self.forcing is None:
            r = self.driver.r
            F = np.zeros((self.m, r))
            F[:r, :r] = np.eye(r)
            self.forcing = LaurentMatrix.constant(F)

    def resolve(self, theta=None):
        vals = dict(self.params)
        if theta:
            unknown = set(theta) - set(vals)
            if unknown:
                raise KeyError(f"unknown parameters: {sorted(unknown)}")
            vals.update(theta)
        return vals

    def symbol(self, theta=None):
        """Instantiate the coefficient template at a parameter point."""
        vals = self.resolve(theta)
        lo = min(s for s, _, _ in self.terms)
        hi = max(s for s, _, _ in self.terms)
        c = np.zeros((hi - lo + 1, self.m, self.n), dtype=complex)
        for s, base, linear in self.terms:
            c[s - lo] += base
            for k, B in linear.items():
                c[s - lo] += vals[k] * B
        return LaurentMatrix(lo, c, trim=False)

    def forcing_gamma(self):
        """The driving term phi * Gamma seen by the solution operator."""
        if isinstance(self.driver, WhiteNoise):
            return self.forcing
        return lm_mul(self.forcing, self.driver.gamma)


@dataclass(frozen=True)
class Classification:
    tag: str  # UniqueSolution | Indeterminate | NoSolutionGeneric | UnitCircleZero
    kappa: tuple = None
    winding: int = None
    dim: int = 0
    circle_points: tuple = ()
    coprime: bool = None

    @property
    def solvable(self):
        return self.tag in ("UniqueSolution", "Indeterminate")

    def __str__(self):
        if self.tag == "Indeterminate":
            return f"Indeterminate({self.dim})"
        if self.tag == "UnitCircleZero":
            return f"UnitCircleZero(coprime={self.coprime})"
        return self.tag


@dataclass
class SolutionSet:
    particular: HardyElement
    kernel_basis: list
    gram: np.ndarray
    classification: Classification

    @property
    def dim(self):
        return len(self.kernel_basis)


def classify(model, theta=None):
    """Existence/uniqueness tags from the winding and partial indices.

    Determinant roots on the circle short-circuit to UnitCircleZero with a
    coprimeness check: at each such point w the stacked matrix [M(w) phi(w)]
    must have full row rank for a solution to remain possible.
    """
    M = model.symbol(theta)
    det = lm_det(M)
    if det.zeros["on"]:
        pts = tuple(r for r, _ in det.zeros["on"])
        phi = model.forcing_gamma()
        coprime = True
        for w in pts:
            w = w / abs(w)
            stacked = np.hstack([lm_eval(M, w), lm_eval(phi, w)])
            s = np.linalg.svd(stacked, compute_uv=False)
            if np.sum(s > TOL_RANK * max(s[0], 1e-300)) < model.m:
                coprime = False
        return Classification("UnitCircleZero", circle_points=pts, coprime=coprime)
    wind = winding_number(det)
    fact = whf(M)
    kappa = fact.kappa
    if any(k < 0 for k in kappa):
        return Classification("NoSolutionGeneric", kappa=kappa, winding=wind)
    if all(k == 0 for k in kappa):
        return Classification("UniqueSolution", kappa=kappa, winding=wind)
    r = model.driver.r
    return Classification("Indeterminate", kappa=kappa, winding=wind,
                          dim=r * sum(kappa))


class UnsolvableError(ValueError):
    def __init__(self, classification):
        super().__init__(f"model has no stationary solution family: {classification}")
        self.classification = classification


def _rowwise_down_shift(f, kappa):
    """Multiply row i by z^(-kappa_i), keeping the joint support block."""
    m = f.rows
    lo = f.lo - max(max(kappa), 0)
    c = np.zeros((f.hi - lo + 1, m, f.cols), dtype=complex)
    for i in range(m):
        for k in range(f.coeffs.shape[0]):
            c[f.lo + k - kappa[i] - lo, i, :] = f.coeffs[k][i, :]
    return LaurentMatrix(lo, c)


def geometric_tail(series, probe=5):
    """Bound on the discarded mass of a truncated geometric-decay series,
    fitted from the oldest stored coefficients."""
    norms = np.linalg.norm(series.coeffs.reshape(series.coeffs.shape[0], -1), axis=1)
    if len(norms) <= probe:
        return 0.0
    a = norms[probe]  # coefficients run oldest-first for a z^- series
    last = norms[0]
    if a <= DROP_TOL or last <= DROP_TOL:
        return 0.0
    q = (last / a) ** (1.0 / probe)
    if q >= 1.0:
        return float(last * probe)
    return float(last * q / (1.0 - q))


def solve_particular(model, theta=None, fact=None, cls=None):
    """Particular solution transfer function.

    Composes the inverse factorization: push the forcing through the inverse
    plus factor, truncate to nonpositive powers, shift row i down by its
    index, and push through the inverse minus factor.
    """
    if cls is None:
        cls = classify(model, theta)
    if not cls.solvable:
        raise UnsolvableError(cls)
    if fact is None:
        fact = whf(model.symbol(theta))
    phi = model.forcing_gamma()
    t1 = project_minus(lm_mul(fact.plus_inv, phi)).series
    t2 = _rowwise_down_shift(t1, fact.kappa)
    xi = lm_mul(fact.minus_inv, t2)
    return HardyElement(xi, geometric_tail(xi))


def kernel_basis(model, theta=None, fact=None, cls=None):
    """Sunspot basis: images under the inverse minus factor of the monomials
    z^(-s) e_i e_j', s = 0..kappa_i - 1, one per driver coordinate.  Count is
    r * sum(kappa).  Returned raw (unorthogonalized) with the Gram matrix."""
    if cls is None:
        cls = classify(model, theta)
    if not cls.solvable:
        raise UnsolvableError(cls)
    if fact is None:
        fact = whf(model.symbol(theta))
    r = model.driver.r
    ups = (model.driver.upsilon if isinstance(model.driver, RationalDriver)
           else LaurentMatrix.identity(r))
    basis = []
    for i, k_i in enumerate(fact.kappa):
        for s in range(k_i):
            for j in range(r):
                E = np.zeros((model.m, r))
                E[i, j] = 1.0
                seed = lm_mul(LaurentMatrix.monomial(-s, E), ups)
                chi = lm_mul(fact.minus_inv, seed)
                basis.append(HardyElement(chi, geometric_tail(chi)))
    gram = np.array([[inner(a, b) for b in basis] for a in basis]) \
        if basis else np.zeros((0, 0))
    return basis, gram


def solve(model, theta=None):
    """Classify, then return the full solution set."""
    cls = classify(model, theta)
    if not cls.solvable:
        raise UnsolvableError(cls)
    fact = whf(model.symbol(theta))
    xi = solve_particular(model, theta, fact=fact, cls=cls)
    basis, gram = kernel_basis(model, theta, fact=fact, cls=cls)
    return SolutionSet(xi, basis, gram, cls)


def assemble_solution(particular, basis, weights):
    if len(weights) != len(basis):
        raise ValueError("weight count does not match basis size")
    out = particular
    for w, chi in zip(weights, basis):
        out = out + complex(w) * chi
    return out


def impulse_responses(xi, S):
    """Coefficient matrices of z^0 .. z^(-S)."""
    if S < 0:
        raise ValueError("horizon must be nonnegative")
    series = xi.series if isinstance(xi, HardyElement) else xi
    return [series.coeff(-s) for s in range(S + 1)]


# -- builtin model zoo --------------------------------------------------------

def _terms(mat_by_power):
    out = []
    for s, (base, linear) in mat_by_power.items():
        out.append((s, np.asarray(base, dtype=complex),
                    {k: np.asarray(v, dtype=complex) for k, v in linear.items()}))
    return out


def builtin_model(name):
    """The hand-written example models used throughout the tests and CLI."""
    if name == "ar1":
        terms = _terms({0: ([[1.0]], {}), -1: ([[0.0]], {"alpha": [[-1.0]]})})
        return ModelSpec("ar1", 1, 1, terms, {"alpha": 0.5})
    if name == "cagan":
        terms = _terms({0: ([[1.0]], {}), 1: ([[0.0]], {"beta": [[-1.0]]})})
        return ModelSpec("cagan", 1, 1, terms, {"beta": 2.0})
    if name == "mixed":
        terms = _terms({1: ([[0.0]], {"a": [[1.0]]}),
                        0: ([[0.0]], {"b": [[1.0]]}),
                        -1: ([[0.0]], {"c": [[1.0]]})})
        # defaults give (1 - 0.3 z)(1 - 0.5 z) z^{-1}: index -1, no solution
        return ModelSpec("mixed", 1, 1, terms, {"a": 0.15, "b": -0.8, "c": 1.0})
    if name == "nongeneric":
        terms = _terms({2: ([[1.0, 0.0], [0.0, 0.0]], {}),
                        1: ([[0.0, 0.0], [0.0, 0.0]],
                            {"theta": [[0.0, 0.0], [1.0, 0.0]]}),
                        0: ([[0.0, 0.0], [0.0, 1.0]], {})})
        return ModelSpec("nongeneric", 2, 2, terms, {"theta": 1.0})
    raise KeyError(f"unknown builtin model: {name}")


BUILTIN_NAMES = ("ar1", "cagan", "mixed", "nongeneric")
