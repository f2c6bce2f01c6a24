"""Two-way ANOVA tests.

Oracle: plain-Python loops computing each sum of squares from first
principles (deviation sums, not subtraction), compared on random grids.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubflow.stats import AnovaResult, MissingCellError, two_way_anova


def brute_force_ss(grid):
    rows = len(grid)
    cols = len(grid[0])
    total = sum(sum(row) for row in grid)
    grand = total / (rows * cols)
    row_means = [sum(row) / cols for row in grid]
    col_means = [sum(grid[i][j] for i in range(rows)) / rows for j in range(cols)]
    ss_rows = cols * sum((m - grand) ** 2 for m in row_means)
    ss_cols = rows * sum((m - grand) ** 2 for m in col_means)
    ss_total = sum((grid[i][j] - grand) ** 2 for i in range(rows) for j in range(cols))
    ss_error = sum(
        (grid[i][j] - row_means[i] - col_means[j] + grand) ** 2
        for i in range(rows)
        for j in range(cols)
    )
    return ss_rows, ss_cols, ss_error, ss_total


class TestSmallGrids:
    def test_two_by_two_example(self):
        result = two_way_anova([[1.0, 2.0], [4.0, 3.0]])
        assert result.factor_a.ss == pytest.approx(4.0)
        assert result.factor_b.ss == pytest.approx(0.0)
        assert result.error.ss == pytest.approx(1.0)
        assert result.total.ss == pytest.approx(5.0)
        assert result.factor_a.f_stat == pytest.approx(4.0)
        assert (result.factor_a.df, result.factor_b.df, result.error.df) == (1, 1, 1)
        assert result.total.df == 3
        assert not result.degenerate

    def test_additive_grid_is_degenerate(self):
        result = two_way_anova([[1.0, 2.0], [3.0, 4.0]])
        assert result.degenerate
        assert result.error.ss == pytest.approx(0.0, abs=1e-12)
        assert result.factor_a.f_stat is None
        assert result.factor_a.p_value is None
        assert result.factor_a.significant is None
        assert result.factor_b.f_stat is None
        # Sums of squares still reported for the table.
        assert result.factor_a.ss == pytest.approx(4.0)
        assert result.factor_b.ss == pytest.approx(1.0)

    def test_constant_grid_degenerate(self):
        result = two_way_anova([[5.0] * 3] * 4)
        assert result.degenerate
        assert result.total.ss == 0.0

    def test_strong_row_effect_significant(self):
        rng = np.random.default_rng(3)
        base = rng.normal(0, 0.5, (6, 12))
        grid = base + np.arange(6)[:, None] * 50.0
        result = two_way_anova(grid.tolist())
        assert not result.degenerate
        assert result.factor_a.significant is True
        assert result.factor_a.p_value < 1e-10

    def test_alpha_controls_significance(self):
        rng = np.random.default_rng(9)
        grid = rng.normal(100, 10, (5, 8))
        loose = two_way_anova(grid.tolist(), alpha=0.9999)
        strict = two_way_anova(grid.tolist(), alpha=1e-12)
        assert loose.factor_b.p_value == strict.factor_b.p_value
        assert loose.factor_b.significant is True
        assert strict.factor_b.significant is False


class TestAgainstBruteForce:
    @given(
        rows=st.integers(2, 8),
        cols=st.integers(2, 12),
        seed=st.integers(0, 2**32 - 1),
    )
    @settings(max_examples=60, deadline=None)
    def test_random_grids(self, rows, cols, seed):
        rng = np.random.default_rng(seed)
        grid = rng.normal(50, 20, (rows, cols)).tolist()
        result = two_way_anova(grid)
        ss_rows, ss_cols, ss_error, ss_total = brute_force_ss(grid)
        scale = max(ss_total, 1.0)
        assert result.factor_a.ss == pytest.approx(ss_rows, abs=1e-9 * scale)
        assert result.factor_b.ss == pytest.approx(ss_cols, abs=1e-9 * scale)
        assert result.error.ss == pytest.approx(ss_error, abs=1e-9 * scale)
        assert result.total.ss == pytest.approx(ss_total, abs=1e-9 * scale)
        if not result.degenerate:
            df_error = (rows - 1) * (cols - 1)
            f_rows = (ss_rows / (rows - 1)) / (ss_error / df_error)
            assert result.factor_a.f_stat == pytest.approx(f_rows, rel=1e-9)

    @given(
        rows=st.integers(2, 6),
        cols=st.integers(2, 6),
        seed=st.integers(0, 2**32 - 1),
    )
    @settings(max_examples=40, deadline=None)
    def test_partition_identity(self, rows, cols, seed):
        rng = np.random.default_rng(seed)
        grid = rng.uniform(0, 1000, (rows, cols)).tolist()
        result = two_way_anova(grid)
        recomposed = result.factor_a.ss + result.factor_b.ss + result.error.ss
        assert recomposed == pytest.approx(result.total.ss, rel=1e-9)


class TestValidation:
    def test_missing_cell(self):
        grid = [[1.0, 2.0], [math.nan, 3.0]]
        with pytest.raises(MissingCellError) as exc:
            two_way_anova(grid)
        assert exc.value.cells == [(1, 0)]
        assert "(1, 0)" in str(exc.value)

    def test_infinite_cell(self):
        with pytest.raises(MissingCellError):
            two_way_anova([[1.0, math.inf], [2.0, 3.0]])

    def test_many_missing_cells_message_capped(self):
        grid = [[math.nan] * 12 for _ in range(3)]
        with pytest.raises(MissingCellError) as exc:
            two_way_anova(grid)
        assert len(exc.value.cells) == 36
        assert "and 26 more" in str(exc.value)

    def test_shape_errors(self):
        with pytest.raises(ValueError):
            two_way_anova([[1.0, 2.0]])
        with pytest.raises(ValueError):
            two_way_anova([[1.0], [2.0]])
        with pytest.raises(ValueError):
            two_way_anova([1.0, 2.0, 3.0])

    def test_alpha_bounds(self):
        grid = [[1.0, 2.0], [4.0, 3.0]]
        with pytest.raises(ValueError):
            two_way_anova(grid, alpha=0.0)
        with pytest.raises(ValueError):
            two_way_anova(grid, alpha=1.0)
