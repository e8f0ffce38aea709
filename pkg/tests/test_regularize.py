"""Minimum-norm and L-regularized solutions."""
import numpy as np
import pytest

from speclrem.hardy import coeff_vector, inner, toeplitz_oracle
from speclrem.laurent import LaurentMatrix, sup_norm
from speclrem.models import builtin_model, kernel_basis
from speclrem.regularize import (BandMask, Composite, Coordinates,
                                 ExpectationShift, Identity, SecondDifference,
                                 apply_regularizer, reg_inner,
                                 regularized_solve, sensitivity_probe,
                                 tikhonov_solve)


def test_tikhonov_matches_closed_form():
    m = builtin_model("nongeneric")
    for th in (-1.5, -0.5, 0.5, 1.0, 2.0):
        s = tikhonov_solve(m, {"theta": th}).transfer.series
        c = 1.0 / (1.0 + th ** 2)
        np.testing.assert_allclose(s.coeff(-2)[0, 0], 1.0, atol=1e-10)
        np.testing.assert_allclose(s.coeff(-1)[0, 1], th * c, atol=1e-10)
        np.testing.assert_allclose(s.coeff(-1)[1, 0], -th, atol=1e-10)
        np.testing.assert_allclose(s.coeff(0)[1, 1], c, atol=1e-10)


def test_tikhonov_solution_is_orthogonal_to_kernel():
    m = builtin_model("nongeneric")
    sol = tikhonov_solve(m, {"theta": 1.0})
    basis, _ = kernel_basis(m, {"theta": 1.0})
    for chi in basis:
        assert abs(inner(sol.transfer, chi)) < 1e-8


def test_tikhonov_matches_dense_pseudoinverse():
    # Moore-Penrose on the truncated Toeplitz matrix reproduces the newest
    # coefficients of the operator solution
    m = builtin_model("cagan")
    sol = tikhonov_solve(m)
    M = m.symbol()
    N = 40
    T = toeplitz_oracle(M, N)
    g = coeff_vector(__import__("speclrem.hardy", fromlist=["HardyElement"])
                     .HardyElement(m.forcing_gamma()), N)
    phi = np.linalg.pinv(T, rcond=1e-10) @ g
    ours = coeff_vector(sol.transfer, N)
    half = (N // 2 + 1) * m.m
    np.testing.assert_allclose(ours[:half], phi[:half], atol=1e-6)


def test_identity_regularized_solve_equals_tikhonov():
    m = builtin_model("nongeneric")
    a = tikhonov_solve(m, {"theta": 1.0}).transfer.series
    b = regularized_solve(m, {"theta": 1.0}, Identity()).transfer.series
    assert sup_norm(a - b, 256) < 1e-8


def test_coordinate_regularizer_prefers_small_selected_rows():
    m = builtin_model("nongeneric")
    full = regularized_solve(m, {"theta": 1.0}, Identity()).transfer
    sel = regularized_solve(m, {"theta": 1.0}, Coordinates((0,))).transfer
    L = Coordinates((0,))
    def size(f):
        return reg_inner(L, f, f).real
    assert size(sel) <= size(full) + 1e-10


def test_second_difference_and_band_mask_apply():
    m = builtin_model("nongeneric")
    phi = tikhonov_solve(m, {"theta": 1.0}).transfer
    for L in (SecondDifference(((0, 1),), 1.0),
              BandMask(((0.0, np.pi / 2),)),
              ExpectationShift(0),
              Composite((Identity(), Coordinates((1,))))):
        out = apply_regularizer(L, phi)
        val = reg_inner(L, phi, phi)
        assert np.isfinite(val.real) and val.real >= -1e-12


def test_regularized_solutions_solve_the_model():
    from speclrem.hardy import apply_symbol
    m = builtin_model("nongeneric")
    M = m.symbol({"theta": 1.0})
    for L in (Identity(), Coordinates((0,)),
              Composite((Identity(), SecondDifference(((0, 1),), 0.5)))):
        sol = regularized_solve(m, {"theta": 1.0}, L)
        resid = apply_symbol(M, sol.transfer).series - m.forcing_gamma()
        assert sup_norm(resid, 256) < 1e-6


def test_sensitivity_probe_reports_discontinuity():
    m = builtin_model("nongeneric")
    rep = sensitivity_probe(m, {"theta": 0.0}, param="theta")
    assert rep["param"] == "theta"
    assert len(rep["rows"]) > 0
    # regularized gaps shrink with h; unregularized squared gaps blow up
    last = rep["rows"][-1]
    first = rep["rows"][0]
    assert last["reg_gap"] < first["reg_gap"]
    assert last["unreg_gap_sq"] > first["unreg_gap_sq"]
    assert last["unreg_gap_sq"] > 1.0 / last["h"] ** 2  # ~ h^{-2} blow-up
