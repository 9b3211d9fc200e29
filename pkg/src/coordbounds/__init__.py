"""Finite-blocklength achievability bounds for rate-limited empirical coordination.

The package computes, for a target joint distribution on finite alphabets:
the exact expected error of a random codebook, the smallest codebook size
meeting a target error (and so the optimal random-codebook rate), the
Gaussian-approximation rate, and a fully non-asymptotic achievability bound
with validity diagnostics, all validated against brute-force and Monte Carlo
oracles.
"""

from ._backend import backend_name
from .bounds import (
    BoundCondition,
    BoundReport,
    CodebookErrorModel,
    ErrorCurve,
    InfeasibleRateError,
    PreconditionError,
    error_curve,
    error_floor,
    exact_achievability_bound,
    expected_codebook_error,
    gaussian_approx_rate,
    get_error_model,
    optimal_random_codebook_rate,
    prob_typical_given_type,
    rate_rounding,
    typicality_prob_bound_check,
)
from .distributions import (
    DistributionError,
    InfoProfile,
    JointDistribution,
    build_distribution,
    dump_distribution,
    info_profile,
    information_density,
    load_distribution,
    third_moment_ratio,
    variance_decomposition_check,
)
from .gaussian import q_function, q_inverse
from .types import (
    ConditionalTypeTable,
    LambdaCache,
    QuantizationError,
    TypeVector,
    TypicalitySpec,
    enumerate_typical_joint_types,
    is_conditionally_typical,
    is_jointly_typical,
    joint_type_of,
    log_type_probability,
    quantize_to_type,
    type_of,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "BoundCondition",
    "BoundReport",
    "CodebookErrorModel",
    "ConditionalTypeTable",
    "DistributionError",
    "ErrorCurve",
    "InfeasibleRateError",
    "InfoProfile",
    "JointDistribution",
    "LambdaCache",
    "PreconditionError",
    "QuantizationError",
    "TypeVector",
    "TypicalitySpec",
    "build_distribution",
    "dump_distribution",
    "enumerate_typical_joint_types",
    "error_curve",
    "error_floor",
    "exact_achievability_bound",
    "expected_codebook_error",
    "gaussian_approx_rate",
    "get_error_model",
    "info_profile",
    "information_density",
    "is_conditionally_typical",
    "is_jointly_typical",
    "joint_type_of",
    "load_distribution",
    "log_type_probability",
    "optimal_random_codebook_rate",
    "prob_typical_given_type",
    "q_function",
    "q_inverse",
    "quantize_to_type",
    "rate_rounding",
    "third_moment_ratio",
    "type_of",
    "typicality_prob_bound_check",
    "variance_decomposition_check",
]
