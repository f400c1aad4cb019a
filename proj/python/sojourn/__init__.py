"""Sojourn-time CLT numerics for stationary Gaussian fields."""

from ._core import (
    ConfigError,
    ConvergenceError,
    CovarianceModel,
    CrossValidationError,
    DivergenceError,
    DomainError,
    Error,
    GridMismatchError,
    GridSpec,
    IoError,
    NotPsdError,
    berman_B_asymptotic,
    berman_constant,
    chaos_covariance_series,
    chaos_variance_inequality,
    corollary_condition,
    covariance_of_indicators,
    fixed_level_bound,
    hermite,
    hermite_scaled,
    indicator_variance_series,
    moving_level_bound,
    run_study_csv,
    sample_field,
    sigma_squared,
    sojourn_time,
    var_sojourn_exact,
    wasserstein1_to_gaussian,
)

__version__ = "0.1.0"
