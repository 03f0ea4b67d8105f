"""Transformed ratio estimator under a gamma superpopulation model."""

from .closed_form import (
    ClosedFormInputs,
    dominance_interval,
    em_bias_alt,
    em_bias_ratio,
    em_mse_alt,
    em_mse_alt_min,
    em_mse_ratio,
    em_var_mean,
    gamma_ratio,
    rel_efficiencies,
)
from .design import (
    DesignExpectation,
    Estimator,
    approx_bias_ratio,
    approx_mse_ratio,
    exact_design_expectation,
    finite_population_moments,
    sampled_design_expectation,
)
from .estimators import alternative_estimate, ratio_estimate, sample_mean
from .params import (
    DesignParams,
    EstimateSet,
    FinitePopulationMoments,
    ParameterError,
    Population,
    SuperPopulationParams,
    validate_params,
)
from .simulate import McConfig, McEstimate, draw_population, mc_model_expectation

__version__ = "0.1.0"

__all__ = [
    "ClosedFormInputs",
    "dominance_interval",
    "em_bias_alt",
    "em_bias_ratio",
    "em_mse_alt",
    "em_mse_alt_min",
    "em_mse_ratio",
    "em_var_mean",
    "gamma_ratio",
    "rel_efficiencies",
    "DesignExpectation",
    "Estimator",
    "approx_bias_ratio",
    "approx_mse_ratio",
    "exact_design_expectation",
    "finite_population_moments",
    "sampled_design_expectation",
    "DesignParams",
    "EstimateSet",
    "FinitePopulationMoments",
    "ParameterError",
    "Population",
    "SuperPopulationParams",
    "validate_params",
    "alternative_estimate",
    "ratio_estimate",
    "sample_mean",
    "McConfig",
    "McEstimate",
    "draw_population",
    "mc_model_expectation",
]
