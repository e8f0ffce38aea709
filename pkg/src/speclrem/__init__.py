"""Frequency-domain solver and likelihood toolkit for linear rational
expectations models: Wiener-Hopf factorization of matrix symbols on the unit
circle, existence/uniqueness classification, particular and regularized
solutions, and limiting/finite-sample Gaussian likelihood surfaces."""

from .hardy import (HardyElement, apply_symbol, inner, op_V, op_Vinv,
                    project_minus, toeplitz_oracle)
from .laurent import (CircleSingularError, LaurentMatrix, ScalarRational,
                      UnitCircleGrid, l2_inner, l2_norm, lm_adjoint, lm_det,
                      lm_eval, lm_mul, sup_norm, winding_number)
from .likelihood import (BoundaryError, SimConfig, TransferFunction,
                         autocovariances, family_transfer,
                         finite_sample_likelihood, limiting_likelihood,
                         outer_factor, reference_likelihood, scan,
                         simulate_paths)
from .models import (Classification, ModelSpec, RationalDriver, SolutionSet,
                     UnsolvableError, WhiteNoise, assemble_solution,
                     builtin_model, classify, impulse_responses, kernel_basis,
                     solve, solve_particular)
from .regularize import (BandMask, Composite, Coordinates, ExpectationShift,
                         Identity, RegularizedSolution, SecondDifference,
                         apply_regularizer, reg_inner, regularized_solve,
                         sensitivity_probe, tikhonov_solve)
from .whf import (FactorizationError, WHFactorization, bauer_minus,
                  factorization_residual, is_generic, partial_indices,
                  spectral_factor_plus, whf, whf_scalar)

__version__ = "0.1.0"
