"""Tail probability tests.

Oracles: mpmath's arbitrary-precision regularized incomplete beta, and
direct numeric integration of the t / F densities with scipy.  The
continued-fraction evaluator must track both down to the underflow floor
(p-values around 1e-105 appear in real panel fits).
"""

from __future__ import annotations

import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from hubflow.stats import (
    regularized_incomplete_beta,
    tail_probability_f,
    tail_probability_t,
)

mpmath.mp.dps = 60


def mp_reg_inc_beta(a: float, b: float, x: float) -> float:
    return float(mpmath.betainc(a, b, 0, x, regularized=True))


def t_density(u: float, df: int) -> float:
    c = math.exp(
        math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)
    )
    return c * (1 + u * u / df) ** (-(df + 1) / 2)


def f_density(u: float, d1: int, d2: int) -> float:
    if u <= 0:
        return 0.0
    log_c = (
        math.lgamma((d1 + d2) / 2)
        - math.lgamma(d1 / 2)
        - math.lgamma(d2 / 2)
        + (d1 / 2) * math.log(d1 / d2)
    )
    return math.exp(log_c + (d1 / 2 - 1) * math.log(u) - ((d1 + d2) / 2) * math.log(1 + d1 * u / d2))


class TestIncompleteBeta:
    @pytest.mark.parametrize(
        "a,b,x",
        [
            (0.5, 0.5, 0.3),
            (2.0, 3.0, 0.5),
            (5.5, 149.5, 0.01),
            (149.5, 0.5, 0.999),
            (1.0, 1.0, 0.42),
            (30.0, 30.0, 0.5),
            (149.5, 5.5, 0.93),
            (0.5, 200.0, 1e-6),
        ],
    )
    def test_matches_mpmath(self, a, b, x):
        got = regularized_incomplete_beta(a, b, x)
        want = mp_reg_inc_beta(a, b, x)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-300)

    def test_endpoints(self):
        assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0

    def test_symmetry(self):
        a, b, x = 3.7, 9.2, 0.31
        lhs = regularized_incomplete_beta(a, b, x)
        rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_deep_tail_stays_in_log_accuracy(self):
        # Tiny x with large opposing shape: the result underflows casual
        # implementations but must stay accurate in log space.
        got = regularized_incomplete_beta(5.5, 149.5, 1e-8)
        want = mp_reg_inc_beta(5.5, 149.5, 1e-8)
        assert math.log10(got) == pytest.approx(math.log10(want), abs=1e-9)

    @given(
        a=st.floats(min_value=0.5, max_value=200.0),
        b=st.floats(min_value=0.5, max_value=200.0),
        x=st.floats(min_value=1e-12, max_value=1.0, exclude_max=True),
    )
    @settings(max_examples=150, deadline=None)
    def test_random_agreement(self, a, b, x):
        got = regularized_incomplete_beta(a, b, x)
        want = mp_reg_inc_beta(a, b, x)
        if want > 1e-290:
            assert got == pytest.approx(want, rel=1e-10)
        elif want > 0:
            assert math.log10(max(got, 1e-320)) == pytest.approx(math.log10(want), abs=1e-6)

    def test_monotone_in_x(self):
        values = [regularized_incomplete_beta(5.5, 149.5, x / 50) for x in range(1, 50)]
        assert values == sorted(values)
        assert all(0.0 <= v <= 1.0 for v in values)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            regularized_incomplete_beta(0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1.0, -2.0, 0.5)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1.0, 1.0, -0.1)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1.0, 1.0, 1.1)


class TestStudentTail:
    def test_zero_and_inf(self):
        assert tail_probability_t(0.0, 10) == 1.0
        assert tail_probability_t(math.inf, 10) == 0.0
        assert tail_probability_t(-math.inf, 10) == 0.0

    def test_sign_symmetry(self):
        assert tail_probability_t(2.5, 30) == tail_probability_t(-2.5, 30)

    @pytest.mark.parametrize("t,df", [(1.0, 5), (2.0, 30), (4.4489, 299), (0.3, 1), (12.0, 299)])
    def test_matches_quadrature(self, t, df):
        want, err = integrate.quad(t_density, abs(t), math.inf, args=(df,), limit=200)
        want *= 2.0
        got = tail_probability_t(t, df)
        assert got == pytest.approx(want, rel=1e-8, abs=1e-300)

    def test_classic_critical_value(self):
        # 97.5th percentile of t(inf-ish): |t|=1.96 two-sided ~0.05
        assert tail_probability_t(1.96, 10_000) == pytest.approx(0.05, abs=2e-4)

    def test_monotone_decreasing_in_t(self):
        values = [tail_probability_t(t / 4, 25) for t in range(0, 60)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            tail_probability_t(math.nan, 10)
        with pytest.raises(ValueError):
            tail_probability_t(1.0, 0)
        with pytest.raises(ValueError):
            tail_probability_t(1.0, -3)
        with pytest.raises(ValueError):
            tail_probability_t(1.0, True)

    @given(t=st.floats(min_value=0.0, max_value=40.0), df=st.integers(1, 400))
    @settings(max_examples=120, deadline=None)
    def test_matches_mpmath_everywhere(self, t, df):
        got = tail_probability_t(t, df)
        want = mp_reg_inc_beta(df / 2.0, 0.5, df / (df + t * t))
        if want > 1e-290:
            assert got == pytest.approx(want, rel=1e-10)
        else:
            assert math.log10(max(got, 1e-320)) == pytest.approx(
                math.log10(max(want, 1e-320)), abs=1e-6
            )


class TestFTail:
    def test_zero_and_inf(self):
        assert tail_probability_f(0.0, 3, 20) == 1.0
        assert tail_probability_f(math.inf, 3, 20) == 0.0

    @pytest.mark.parametrize("f,d1,d2", [(1.0, 3, 20), (2.5, 11, 299), (5.0, 1, 1), (0.2, 6, 40)])
    def test_matches_quadrature(self, f, d1, d2):
        want, err = integrate.quad(f_density, f, math.inf, args=(d1, d2), limit=300)
        got = tail_probability_f(f, d1, d2)
        assert got == pytest.approx(want, rel=1e-7)

    def test_deep_tail_log_accuracy(self):
        got = tail_probability_f(125.4175, 11, 299)
        want = mp_reg_inc_beta(299 / 2.0, 11 / 2.0, 299.0 / (299.0 + 11 * 125.4175))
        # mpmath computes I_x(a, b); our F tail is I_{x}(df2/2, df1/2)
        assert want > 0
        assert math.log10(got) == pytest.approx(math.log10(want), abs=1e-8)

    def test_monotone_decreasing_in_f(self):
        values = [tail_probability_f(f / 2, 11, 299) for f in range(0, 40)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            tail_probability_f(-0.5, 3, 20)
        with pytest.raises(ValueError):
            tail_probability_f(math.nan, 3, 20)
        with pytest.raises(ValueError):
            tail_probability_f(1.0, 0, 20)
        with pytest.raises(ValueError):
            tail_probability_f(1.0, 3, 0)

    @given(
        f=st.floats(min_value=0.0, max_value=500.0),
        d1=st.integers(1, 30),
        d2=st.integers(1, 400),
    )
    @settings(max_examples=120, deadline=None)
    def test_matches_mpmath_everywhere(self, f, d1, d2):
        got = tail_probability_f(f, d1, d2)
        want = mp_reg_inc_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))
        if want > 1e-290:
            assert got == pytest.approx(want, rel=1e-10)
        else:
            assert math.log10(max(got, 1e-320)) == pytest.approx(
                math.log10(max(want, 1e-320)), abs=1e-6
            )
