"""Polya-type kernels, random feature maps and ridge regression."""

from ._core import (
    ConvergenceError,
    DimensionError,
    DisagreementError,
    DomainError,
    FeatureMap,
    NumericalError,
    ParseError,
    QuadratureError,
    RidgeModel,
    area_under_curve,
    eval_ft,
    eval_kernel,
    exact_gram,
    expected_sq_frobenius,
    kernel_to_cdf,
    run_cli,
    specfun,
    variance_theory,
)

__all__ = [
    "ConvergenceError",
    "DimensionError",
    "DisagreementError",
    "DomainError",
    "FeatureMap",
    "NumericalError",
    "ParseError",
    "QuadratureError",
    "RidgeModel",
    "area_under_curve",
    "eval_ft",
    "eval_kernel",
    "exact_gram",
    "expected_sq_frobenius",
    "kernel_to_cdf",
    "run_cli",
    "specfun",
    "variance_theory",
]
