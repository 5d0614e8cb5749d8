"""Amplitude-equation solvers for weakly nonlinear oscillators and their direct references."""

from .amplitude import (
    MODELS,
    AmplitudeModel,
    AmplitudeTrajectory,
    CarrierTerm,
    CompatibilityReport,
    ReconstructionMap,
    amplitude_solve,
    cross_derivative_check,
    damped_linear_model,
    damped_quadratic_model,
    duffing_model,
    fit_initial_conditions,
    reconstruct,
    reconstruction_imag,
)
from .reference import (
    DenseTrajectory,
    ReferenceProblem,
    bvp_regular_expansion,
    damped_linear_exact,
    damped_linear_problem,
    damped_quadratic_problem,
    duffing_problem,
    regular_expansion_damped,
    rk_reference_solve,
)

__all__ = [
    "MODELS",
    "AmplitudeModel",
    "AmplitudeTrajectory",
    "CarrierTerm",
    "CompatibilityReport",
    "DenseTrajectory",
    "ReconstructionMap",
    "ReferenceProblem",
    "amplitude_solve",
    "bvp_regular_expansion",
    "cross_derivative_check",
    "damped_linear_exact",
    "damped_linear_model",
    "damped_linear_problem",
    "damped_quadratic_model",
    "damped_quadratic_problem",
    "duffing_model",
    "duffing_problem",
    "fit_initial_conditions",
    "reconstruct",
    "reconstruction_imag",
    "regular_expansion_damped",
    "rk_reference_solve",
]
