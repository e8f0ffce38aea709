"""Minimum-norm and operator-weighted regularized solutions.

The minimum-norm (Moore-Penrose) solution inverts the symbol through the
positive system S = M M*: S is factored as V V* with V a one-sided series in
z, the factor equations are solved by truncate-and-multiply, and the result
is the unique solution orthogonal to the sunspot kernel.  General weighting
operators L shrink along the kernel directions instead, through the Gram
system of L-inner products.
"""
from dataclasses import dataclass, field

import numpy as np

from .hardy import (HardyElement, apply_symbol, inner, op_V, op_Vinv,
                    project_minus)
from .laurent import (GRID_N, LaurentMatrix, grid_eval, l2_norm, lm_adjoint,
                      lm_mul, sup_norm)
from .models import classify, kernel_basis, solve_particular
from .whf import series_inverse, spectral_factor_plus, whf

TOL_GRAM = 1e-10
SERIES_N = 256


# -- weighting operators ------------------------------------------------------

@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class Coordinates:
    indices: tuple


@dataclass(frozen=True)
class ExpectationShift:
    coordinate: int


@dataclass(frozen=True)
class SecondDifference:
    pairs: tuple  # of (i, j)
    weight: float = 1.0


@dataclass(frozen=True)
class BandMask:
    arcs: tuple  # of (lo, hi) half-open angle intervals in radians


@dataclass(frozen=True)
class Composite:
    parts: tuple

    def __post_init__(self):
        if not self.parts:
            raise ValueError("empty composite regularizer")


@dataclass
class GridComponent:
    """A regularizer output living on the circle grid (band-mask path)."""
    values: np.ndarray  # (N, rows, cols), already masked


def _row(f, i):
    series = f.series if isinstance(f, HardyElement) else f
    if not 0 <= i < series.rows:
        raise IndexError(f"coordinate {i} out of range for {series.rows} rows")
    return HardyElement(series.row(i), getattr(f, "tail_bound", 0.0))


def _second_difference(f):
    return project_minus(op_V(f).series + op_Vinv(f).series - 2.0 * f.series,
                         3.0 * f.tail_bound)


def _mask_indicator(arcs, n):
    ang = 2.0 * np.pi * np.arange(n) / n
    ind = np.zeros(n, dtype=bool)
    for lo, hi in arcs:
        lo, hi = lo % (2 * np.pi), hi % (2 * np.pi)
        if lo <= hi:
            ind |= (ang >= lo) & (ang < hi)
        else:
            ind |= (ang >= lo) | (ang < hi)
    return ind


def apply_regularizer(L, f):
    """Image of a transfer element under the weighting operator, as a list of
    components (series pieces, or masked grid values for band masks)."""
    if isinstance(L, Identity):
        return [f if isinstance(f, HardyElement) else HardyElement(f)]
    if isinstance(L, Coordinates):
        return [_row(f, i) for i in L.indices]
    if isinstance(L, ExpectationShift):
        return [op_V(_row(f, L.coordinate))]
    if isinstance(L, SecondDifference):
        out = []
        for i, j in L.pairs:
            out.append(_second_difference(_row(f, i)))
            out.append(L.weight * _second_difference(_row(f, j)))
        return out
    if isinstance(L, BandMask):
        series = f.series if isinstance(f, HardyElement) else f
        vals = grid_eval(series)
        ind = _mask_indicator(L.arcs, vals.shape[0])
        return [GridComponent(vals * ind[:, None, None])]
    if isinstance(L, Composite):
        out = []
        for part in L.parts:
            out.extend(apply_regularizer(part, f))
        return out
    raise TypeError(f"unknown regularizer: {L!r}")


def reg_inner(L, f, g):
    """<Lf, Lg> summed over regularizer components; band-mask components use
    grid quadrature."""
    acc = 0.0 + 0.0j
    for a, b in zip(apply_regularizer(L, f), apply_regularizer(L, g)):
        if isinstance(a, GridComponent):
            acc += np.mean(np.sum(a.values * np.conj(b.values), axis=(1, 2)))
        else:
            acc += inner(a, b)
    return complex(acc)


# -- solutions ----------------------------------------------------------------

@dataclass
class RegularizedSolution:
    transfer: HardyElement
    method: str  # "moore-penrose" | "general-L"
    residual: float
    gram_residuals: np.ndarray
    unique: bool = True
    classification: object = None


def tikhonov_solve(model, theta=None, n_terms=SERIES_N, cls=None):
    """Minimum-norm solution phi = M* S^{-1} forcing with S = M M*.

    S is positive definite on the circle, so it factors as V V* with V a
    one-sided series in z invertible on the closed disk.  The operator system
    then splits into two triangular solves: truncate V^{-1} forcing, multiply
    by (V*)^{-1}, multiply by M*, truncate.
    """
    if cls is None:
        cls = classify(model, theta)
    if not cls.solvable:
        from .models import UnsolvableError
        raise UnsolvableError(cls)
    M = model.symbol(theta)
    S = lm_mul(M, lm_adjoint(M))
    V = spectral_factor_plus(S, tol=1e-12)
    V_inv = series_inverse(V, n_terms)
    Vstar_inv = lm_adjoint(V_inv)
    g = model.forcing_gamma()
    t = project_minus(lm_mul(V_inv, g))
    psi = lm_mul(Vstar_inv, t.series)
    phi = project_minus(lm_mul(lm_adjoint(M), psi))
    resid = _solve_residual(M, phi, g)
    if cls.tag == "Indeterminate":
        basis, _ = kernel_basis(model, theta, cls=cls)
        orth = np.array([abs(inner(phi, chi)) for chi in basis])
    else:
        orth = np.zeros(0)
    return RegularizedSolution(phi, "moore-penrose", resid, orth,
                               classification=cls)


def _solve_residual(M, phi, g):
    r = apply_symbol(M, phi).series - g
    return l2_norm(r)


def regularized_solve(model, theta=None, L=None, cls=None):
    """Solution minimizing |L phi| over the solution family.

    Starts from the minimum-norm solution rho, removes the L-weighted
    projection onto the kernel: solve G c = b with G_{kl} = <L chi_k, L chi_l>
    and b_k = <L rho, L chi_k>, return rho - sum c_k chi_k.  The minimizer is
    unique iff G is nonsingular (the kernels of L and of the symbol meet only
    at zero); a singular G still returns one minimizer, flagged non-unique.
    """
    if L is None:
        L = Identity()
    if cls is None:
        cls = classify(model, theta)
    rho_sol = tikhonov_solve(model, theta, cls=cls)
    if isinstance(L, Identity) or cls.tag == "UniqueSolution":
        rho_sol.method = "general-L" if not isinstance(L, Identity) else rho_sol.method
        return rho_sol
    basis, _ = kernel_basis(model, theta, cls=cls)
    rho = rho_sol.transfer
    G = np.array([[reg_inner(L, a, b) for b in basis] for a in basis])
    b = np.array([reg_inner(L, rho, chi) for chi in basis])
    eig_min = float(np.min(np.linalg.eigvalsh((G + G.conj().T) / 2.0))) if len(basis) else 0.0
    unique = eig_min >= TOL_GRAM
    c = np.linalg.lstsq(G, b, rcond=None)[0]
    phi = rho
    for ck, chi in zip(c, basis):
        phi = phi - complex(ck) * chi
    gram_res = np.array([abs(reg_inner(L, phi, chi)) for chi in basis])
    resid = _solve_residual(model.symbol(theta), phi, model.forcing_gamma())
    return RegularizedSolution(phi, "general-L", resid, gram_res, unique, cls)


def sensitivity_probe(model, theta0, L=None, steps=None, param=None):
    """Continuity and smoothness profile of the regularized and unregularized
    solutions around a parameter point.

    For each step h: sup-norm gap of the regularized solution, squared
    H-norm gap of the particular solution, and central difference quotients;
    a Richardson-style order estimate comes from consecutive quotients.
    Classification changes inside the probe window are recorded, not fatal.
    """
    if L is None:
        L = Identity()
    if steps is None:
        steps = [2.0 ** -k for k in range(3, 13)]
    if param is None:
        param = sorted(model.params)[0]
    base_theta = model.resolve(theta0 if isinstance(theta0, dict)
                               else {param: theta0})

    def at(v):
        th = dict(base_theta)
        th[param] = v
        return th

    t0 = base_theta[param]
    notes = []

    def reg_at(v):
        try:
            return regularized_solve(model, at(v), L).transfer
        except Exception as e:  # classification change inside the window
            notes.append(f"{param}={v}: {e}")
            return None

    def part_at(v):
        try:
            return solve_particular(model, at(v))
        except Exception as e:
            notes.append(f"{param}={v}: {e}")
            return None

    phi0 = reg_at(t0)
    part0 = part_at(t0)
    rows = []
    for h in steps:
        up, dn = reg_at(t0 + h), reg_at(t0 - h)
        row = {"h": h}
        if phi0 is not None and up is not None:
            row["reg_gap"] = sup_norm((up - phi0).series)
            if dn is not None:
                row["reg_first_quotient"] = sup_norm(
                    ((up - dn) * (1.0 / (2.0 * h))).series)
        pu = part_at(t0 + h)
        if part0 is not None and pu is not None:
            row["unreg_gap_sq"] = l2_norm((pu - part0).series) ** 2
        rows.append(row)
    quots = [r.get("reg_first_quotient") for r in rows]
    ratios = [float(a / b) for a, b in zip(quots, quots[1:])
              if a is not None and b is not None and b > 0]
    return {"param": param, "theta0": t0, "rows": rows,
            "quotient_ratios": ratios, "notes": notes}
