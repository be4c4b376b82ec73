"""Positivity tests for tau_{n,k} maps with a Hadamard-product subtraction."""

from .errors import InvalidInputError, InvalidStateError, SearchFailure
from .map_kernel import MapSpec, optimized_apply, tau_apply
from .positivity_engine import LambdaMaxResult, SearchSettings, is_positive, lambda_max, robust_min

__all__ = [
    "InvalidInputError",
    "InvalidStateError",
    "LambdaMaxResult",
    "MapSpec",
    "SearchFailure",
    "SearchSettings",
    "is_positive",
    "lambda_max",
    "optimized_apply",
    "robust_min",
    "tau_apply",
]
