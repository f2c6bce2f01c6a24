"""Statistical core: two-way ANOVA, dummy-variable period regression,
and t/F tail probabilities."""

from .anova import AnovaComponent, AnovaFactor, AnovaResult, MissingCellError, two_way_anova
from .regression import (
    CoefficientStats,
    DegreesOfFreedomError,
    FitStatistics,
    RankDeficiencyError,
    RegressionAnova,
    RegressionFit,
    ValidationReport,
    compute_fit_statistics,
    fit_dummy_regression,
    fit_period_regression,
    predict,
    validate_mape,
)
from .tails import (
    regularized_incomplete_beta,
    tail_probability_f,
    tail_probability_t,
)

__all__ = [
    "AnovaComponent",
    "AnovaFactor",
    "AnovaResult",
    "MissingCellError",
    "two_way_anova",
    "CoefficientStats",
    "DegreesOfFreedomError",
    "FitStatistics",
    "RankDeficiencyError",
    "RegressionAnova",
    "RegressionFit",
    "ValidationReport",
    "compute_fit_statistics",
    "fit_dummy_regression",
    "fit_period_regression",
    "predict",
    "validate_mape",
    "regularized_incomplete_beta",
    "tail_probability_f",
    "tail_probability_t",
]
