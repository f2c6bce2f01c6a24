"""Dummy-variable regression of per-period flows.

The model explains a flow count by its period of day: one indicator per
period except the last, which serves as the reference level, plus an
intercept.  On a balanced design the intercept equals the reference
period's mean and each coefficient is that period's mean offset from it.
The fit report carries the usual regression statistics, the ANOVA block,
and per-coefficient inference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .tails import tail_probability_f, tail_probability_t

if TYPE_CHECKING:  # analytics imports stats nowhere, keep it that way
    from ..analytics import FlowSeries


class RankDeficiencyError(ValueError):
    """A period has no observations, so its coefficient is unidentifiable."""

    def __init__(self, period: int) -> None:
        self.period = period
        super().__init__(f"period {period} has no observations")


class DegreesOfFreedomError(ValueError):
    """Too few observations for the requested model."""


@dataclass(frozen=True)
class FitStatistics:
    multiple_r: float
    r_square: float
    adjusted_r_square: float
    std_error: float
    observations: int


@dataclass(frozen=True)
class RegressionAnova:
    df_reg: int
    ss_reg: float
    ms_reg: float
    f_stat: float
    significance_f: float
    df_res: int
    ss_res: float
    ms_res: float
    df_total: int
    ss_total: float


@dataclass(frozen=True)
class CoefficientStats:
    term: str
    value: float
    std_error: float
    t_stat: float
    p_value: float


@dataclass(frozen=True)
class ValidationReport:
    errors_pct: tuple[float, ...]
    max_error_pct: float
    min_error_pct: float
    mean_error_pct: float
    excluded_zero_actuals: int

    @property
    def samples(self) -> int:
        return len(self.errors_pct)


@dataclass(frozen=True)
class RegressionFit:
    """Fitted period model: predict(j) = intercept + effect_j (reference
    period's effect is zero by construction)."""

    n_periods: int
    period_effects: tuple[float, ...]  # length n_periods - 1
    intercept: float
    coefficient_table: tuple[CoefficientStats, ...]  # intercept row first
    statistics: FitStatistics
    anova: RegressionAnova

    def predict(self, period: int) -> float:
        if not 1 <= period <= self.n_periods:
            raise ValueError(f"period {period} outside 1..{self.n_periods}")
        if period == self.n_periods:
            return self.intercept
        return self.intercept + self.period_effects[period - 1]

    def to_report_dict(self) -> dict:
        return {
            "model": {
                "periods": self.n_periods,
                "reference_period": self.n_periods,
                "intercept": self.intercept,
                "period_effects": {str(j + 1): v for j, v in enumerate(self.period_effects)},
            },
            "regression_statistics": {
                "multiple_r": self.statistics.multiple_r,
                "r_square": self.statistics.r_square,
                "adjusted_r_square": self.statistics.adjusted_r_square,
                "standard_error": self.statistics.std_error,
                "observations": self.statistics.observations,
            },
            "anova": {
                "regression": {
                    "df": self.anova.df_reg,
                    "ss": self.anova.ss_reg,
                    "ms": self.anova.ms_reg,
                    "f": self.anova.f_stat,
                    "significance_f": self.anova.significance_f,
                },
                "residual": {
                    "df": self.anova.df_res,
                    "ss": self.anova.ss_res,
                    "ms": self.anova.ms_res,
                },
                "total": {"df": self.anova.df_total, "ss": self.anova.ss_total},
            },
            "coefficients": [
                {
                    "term": c.term,
                    "coefficient": c.value,
                    "standard_error": c.std_error,
                    "t_stat": c.t_stat,
                    "p_value": c.p_value,
                }
                for c in self.coefficient_table
            ],
        }

    @classmethod
    def from_report_dict(cls, doc: dict) -> "RegressionFit":
        model = doc["model"]
        n_periods = int(model["periods"])
        effects = tuple(
            float(model["period_effects"][str(j)]) for j in range(1, n_periods)
        )
        stats_doc = doc["regression_statistics"]
        anova_doc = doc["anova"]
        return cls(
            n_periods=n_periods,
            period_effects=effects,
            intercept=float(model["intercept"]),
            coefficient_table=tuple(
                CoefficientStats(
                    term=c["term"],
                    value=float(c["coefficient"]),
                    std_error=float(c["standard_error"]),
                    t_stat=float(c["t_stat"]),
                    p_value=float(c["p_value"]),
                )
                for c in doc["coefficients"]
            ),
            statistics=FitStatistics(
                multiple_r=float(stats_doc["multiple_r"]),
                r_square=float(stats_doc["r_square"]),
                adjusted_r_square=float(stats_doc["adjusted_r_square"]),
                std_error=float(stats_doc["standard_error"]),
                observations=int(stats_doc["observations"]),
            ),
            anova=RegressionAnova(
                df_reg=int(anova_doc["regression"]["df"]),
                ss_reg=float(anova_doc["regression"]["ss"]),
                ms_reg=float(anova_doc["regression"]["ms"]),
                f_stat=float(anova_doc["regression"]["f"]),
                significance_f=float(anova_doc["regression"]["significance_f"]),
                df_res=int(anova_doc["residual"]["df"]),
                ss_res=float(anova_doc["residual"]["ss"]),
                ms_res=float(anova_doc["residual"]["ms"]),
                df_total=int(anova_doc["total"]["df"]),
                ss_total=float(anova_doc["total"]["ss"]),
            ),
        )


def compute_fit_statistics(
    ss_reg: float, ss_res: float, n: int, p: int
) -> tuple[FitStatistics, RegressionAnova]:
    """Regression summary and ANOVA block from the sum-of-squares split.

    ``p`` counts slope terms (the intercept is extra), so the residual
    degrees of freedom are n - p - 1.
    """
    if ss_reg < 0 or ss_res < 0:
        raise ValueError("sums of squares must be nonnegative")
    if p < 1:
        raise ValueError("p must be at least 1")
    df_res = n - p - 1
    if df_res < 1:
        raise DegreesOfFreedomError(f"n={n} leaves no residual degrees of freedom for p={p}")
    ss_total = ss_reg + ss_res
    if ss_total == 0.0:
        r_square = 0.0
    else:
        r_square = ss_reg / ss_total
    adjusted = 1.0 - (1.0 - r_square) * (n - 1) / df_res
    ms_res = ss_res / df_res
    ms_reg = ss_reg / p
    std_error = math.sqrt(ms_res)
    if ss_res == 0.0:
        f_stat = math.inf if ss_reg > 0 else 0.0
        significance = 0.0 if ss_reg > 0 else 1.0
    else:
        f_stat = ms_reg / ms_res
        significance = tail_probability_f(f_stat, p, df_res)
    stats = FitStatistics(
        multiple_r=math.sqrt(r_square),
        r_square=r_square,
        adjusted_r_square=adjusted,
        std_error=std_error,
        observations=n,
    )
    anova = RegressionAnova(
        df_reg=p,
        ss_reg=ss_reg,
        ms_reg=ms_reg,
        f_stat=f_stat,
        significance_f=significance,
        df_res=df_res,
        ss_res=ss_res,
        ms_res=ms_res,
        df_total=n - 1,
        ss_total=ss_total,
    )
    return stats, anova


def fit_period_regression(
    observations: Sequence[tuple[int, float]], n_periods: int = 12
) -> RegressionFit:
    """Least-squares fit of the period-indicator model.

    ``observations`` are (period, flow) pairs, periods 1-based.  Every
    period must appear at least once and the panel may be unbalanced.
    """
    if n_periods < 2:
        raise ValueError("need at least 2 periods")
    n = len(observations)
    if n < n_periods + 1:
        raise DegreesOfFreedomError(
            f"{n} observations cannot support {n_periods - 1} dummies plus intercept"
        )
    seen: set[int] = set()
    for period, _ in observations:
        if not 1 <= period <= n_periods:
            raise ValueError(f"period {period} outside 1..{n_periods}")
        seen.add(period)
    for period in range(1, n_periods + 1):
        if period not in seen:
            raise RankDeficiencyError(period)

    p = n_periods - 1
    x = np.zeros((n, p + 1))
    y = np.empty(n)
    for i, (period, flow) in enumerate(observations):
        if period < n_periods:
            x[i, period - 1] = 1.0
        x[i, p] = 1.0  # intercept column
        y[i] = flow

    beta, *_ = np.linalg.lstsq(x, y, rcond=None)
    fitted = x @ beta
    residuals = y - fitted
    ss_res = float(residuals @ residuals)
    centered = y - y.mean()
    ss_total = float(centered @ centered)
    ss_reg = float(max(ss_total - ss_res, 0.0))
    stats, anova = compute_fit_statistics(ss_reg, ss_res, n, p)

    xtx_inv = np.linalg.inv(x.T @ x)
    diag = np.clip(np.diag(xtx_inv), 0.0, None)
    table = []
    order = [p] + list(range(p))  # intercept row first, then period terms
    names = {p: "intercept", **{j: f"period_{j + 1}" for j in range(p)}}
    for idx in order:
        value = float(beta[idx])
        se = math.sqrt(anova.ms_res * diag[idx])
        if se == 0.0:
            t_stat = 0.0 if value == 0.0 else math.copysign(math.inf, value)
            p_value = 1.0 if value == 0.0 else 0.0
        else:
            t_stat = value / se
            p_value = tail_probability_t(t_stat, anova.df_res)
        table.append(CoefficientStats(names[idx], value, se, t_stat, p_value))

    return RegressionFit(
        n_periods=n_periods,
        period_effects=tuple(float(b) for b in beta[:p]),
        intercept=float(beta[p]),
        coefficient_table=tuple(table),
        statistics=stats,
        anova=anova,
    )


def fit_dummy_regression(series: "FlowSeries") -> RegressionFit:
    """Fit the period model to a dense flow series."""
    observations = [(e.period, float(e.count)) for e in series.entries]
    return fit_period_regression(observations, n_periods=series.periods_per_day)


def predict(fit: RegressionFit, period: int) -> float:
    return fit.predict(period)


def validate_mape(fit: RegressionFit, holdout: "FlowSeries") -> ValidationReport:
    """Percentage errors of the fit against held-out flows.

    Each error is 100 * |predicted - actual| / actual.  Zero actuals are
    excluded and counted, since their relative error is undefined.
    """
    if not holdout.entries:
        raise ValueError("empty holdout series")
    errors = []
    excluded = 0
    for entry in holdout.entries:
        if entry.count == 0:
            excluded += 1
            continue
        predicted = fit.predict(entry.period)
        errors.append(100.0 * abs(predicted - entry.count) / entry.count)
    if not errors:
        raise ValueError("holdout has no nonzero actuals")
    return ValidationReport(
        errors_pct=tuple(errors),
        max_error_pct=max(errors),
        min_error_pct=min(errors),
        mean_error_pct=sum(errors) / len(errors),
        excluded_zero_actuals=excluded,
    )
