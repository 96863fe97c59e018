"""Blocking probability of the Engset (M/M/m/m/N) queue."""

from .core import (
    EngsetInstance,
    ReciprocalPolynomial,
    SolverConfig,
    eval_f,
    eval_f_prime,
    eval_reciprocal,
    falling_factorial,
    hyp2f1_terminating,
    pochhammer,
    reciprocal_coefficients,
)
from .errors import (
    CoefficientOverflowError,
    DomainError,
    EngsetError,
    InvalidInputError,
    InvalidParametersError,
    UnsupportedParametersError,
)
from .kernels import USE_NUMBA
from .solvers import Method, SolveResult, Status, bisect, fixed_point, iteration_bound, newton, solve

__version__ = "0.1.0"

__all__ = [
    "CoefficientOverflowError",
    "DomainError",
    "EngsetError",
    "EngsetInstance",
    "InvalidInputError",
    "InvalidParametersError",
    "Method",
    "ReciprocalPolynomial",
    "SolveResult",
    "SolverConfig",
    "Status",
    "USE_NUMBA",
    "UnsupportedParametersError",
    "bisect",
    "eval_f",
    "eval_f_prime",
    "eval_reciprocal",
    "falling_factorial",
    "fixed_point",
    "hyp2f1_terminating",
    "iteration_bound",
    "newton",
    "pochhammer",
    "reciprocal_coefficients",
    "solve",
]
