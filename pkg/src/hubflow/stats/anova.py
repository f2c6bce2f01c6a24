"""Two-way ANOVA without replication.

Input is a complete grid with one observation per cell (dates down the
rows, periods across the columns).  With a single observation per cell
the interaction cannot be separated from noise, so the residual term
doubles as the error estimate; a perfectly additive grid therefore has
zero error mean square and F ratios are undefined (flagged degenerate
rather than faked).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tails import tail_probability_f


class MissingCellError(ValueError):
    """The grid has empty or non-finite cells; impute or subset first."""

    def __init__(self, cells: list[tuple[int, int]]) -> None:
        self.cells = cells
        shown = ", ".join(f"({r}, {c})" for r, c in cells[:10])
        more = "" if len(cells) <= 10 else f" and {len(cells) - 10} more"
        super().__init__(f"missing cells at {shown}{more}")


@dataclass(frozen=True)
class AnovaFactor:
    ss: float
    df: int
    ms: float
    f_stat: float | None
    p_value: float | None
    significant: bool | None


@dataclass(frozen=True)
class AnovaComponent:
    ss: float
    df: int
    ms: float | None


@dataclass(frozen=True)
class AnovaResult:
    factor_a: AnovaFactor  # rows (dates)
    factor_b: AnovaFactor  # columns (periods)
    error: AnovaComponent
    total: AnovaComponent
    alpha: float
    degenerate: bool


def two_way_anova(grid: Sequence[Sequence[float]], alpha: float = 0.05) -> AnovaResult:
    """Decompose an r x c grid into row, column, and error sums of squares.

    Requires r >= 2 and c >= 2.  F ratios test each factor's mean square
    against the error mean square; ``significant`` compares the p-value
    to ``alpha``.  When the error mean square is zero the F ratios are
    undefined and the result is flagged degenerate.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    data = np.asarray(grid, dtype=float)
    if data.ndim != 2:
        raise ValueError(f"grid must be 2-dimensional, got shape {data.shape}")
    r, c = data.shape
    if r < 2 or c < 2:
        raise ValueError(f"grid must be at least 2x2, got {r}x{c}")
    bad = np.argwhere(~np.isfinite(data))
    if bad.size:
        raise MissingCellError([(int(i), int(j)) for i, j in bad])

    grand = data.mean()
    row_means = data.mean(axis=1)
    col_means = data.mean(axis=0)
    ss_rows = float(c * np.sum((row_means - grand) ** 2))
    ss_cols = float(r * np.sum((col_means - grand) ** 2))
    interaction = data - row_means[:, None] - col_means[None, :] + grand
    ss_error = float(np.sum(interaction**2))
    ss_total = float(np.sum((data - grand) ** 2))

    df_rows = r - 1
    df_cols = c - 1
    df_error = df_rows * df_cols
    ms_rows = ss_rows / df_rows
    ms_cols = ss_cols / df_cols
    ms_error = ss_error / df_error

    # An additive grid leaves only rounding dust in the interaction term.
    degenerate = ss_error <= 1e-12 * max(ss_total, 1.0)
    if degenerate:
        f_rows = p_rows = sig_rows = None
        f_cols = p_cols = sig_cols = None
    else:
        f_rows = ms_rows / ms_error
        f_cols = ms_cols / ms_error
        p_rows = tail_probability_f(f_rows, df_rows, df_error)
        p_cols = tail_probability_f(f_cols, df_cols, df_error)
        sig_rows = p_rows < alpha
        sig_cols = p_cols < alpha

    return AnovaResult(
        factor_a=AnovaFactor(ss_rows, df_rows, ms_rows, f_rows, p_rows, sig_rows),
        factor_b=AnovaFactor(ss_cols, df_cols, ms_cols, f_cols, p_cols, sig_cols),
        error=AnovaComponent(ss_error, df_error, ms_error),
        total=AnovaComponent(ss_total, r * c - 1, None),
        alpha=alpha,
        degenerate=degenerate,
    )
