"""Spectral asymptotics of fractional Gaussian processes and their small-ball constants."""

from ._validation import ConvergenceError, NumericalError
from .asymptotics import (
    BoundaryConditions,
    TwoTermModel,
    bc_model,
    eigen_asymptotic,
    nu_shift,
    process_asymptotic,
    process_model,
    reduced_problem,
)
from .estimators import GalerkinSpectrum, NystromSpectrum, SmallBallEstimator, TwoTermAsymptotics
from .kernels import ProcessSpec, cov_matrix, fbm_cov
from .nystrom import EigenSequence, eigen_nystrom, remainder_diagnostic, symmetric_eigs
from .galerkin import eigen_galerkin, solve_generalized, weak_forms
from .smallball import constants_for, constants_table, d_constant, b_constant

__version__ = "0.1.0"

__all__ = [
    "BoundaryConditions", "ConvergenceError", "EigenSequence", "GalerkinSpectrum",
    "NumericalError", "NystromSpectrum", "ProcessSpec", "SmallBallEstimator",
    "TwoTermAsymptotics", "TwoTermModel", "b_constant", "bc_model", "constants_for",
    "constants_table", "cov_matrix", "d_constant", "eigen_asymptotic", "eigen_galerkin",
    "eigen_nystrom", "fbm_cov", "nu_shift", "process_asymptotic", "process_model",
    "reduced_problem", "remainder_diagnostic", "solve_generalized", "symmetric_eigs",
    "weak_forms",
]
