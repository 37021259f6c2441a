from __future__ import annotations

import math
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from safebnb import interval as ia
from safebnb.interval import EMPTY, ENTIRE, Box, Interval, interval_binary, interval_unary

getcontext().prec = 60

@st.composite
def intervals(draw, lo=-1e6, hi=1e6):
    a = draw(st.floats(min_value=lo, max_value=hi, allow_nan=False))
    b = draw(st.floats(min_value=lo, max_value=hi, allow_nan=False))
    return Interval(min(a, b), max(a, b))


@st.composite
def interval_and_point(draw, lo=-1e6, hi=1e6):
    iv = draw(intervals(lo, hi))
    t = draw(st.floats(min_value=0.0, max_value=1.0))
    x = iv.lo + t * (iv.hi - iv.lo)
    return iv, min(max(x, iv.lo), iv.hi)


def encloses(iv: Interval, exact) -> bool:
    lo_ok = iv.lo == -math.inf or Fraction(iv.lo) <= exact
    hi_ok = iv.hi == math.inf or exact <= Fraction(iv.hi)
    return lo_ok and hi_ok


class TestExamples:
    def test_add(self):
        assert Interval(1, 2) + Interval(3, 4) == Interval(4, 6)

    def test_mul_mixed_sign(self):
        assert Interval(-1, 2) * Interval(3, 4) == Interval(-4, 8)

    def test_third_is_tight(self):
        r = Interval(1, 1) / Interval(3, 3)
        assert encloses(r, Fraction(1, 3))
        assert ia.next_up(ia.next_up(r.lo)) >= r.hi

    def test_sqr_straddling_zero(self):
        assert ia.sqr(Interval(-2, 1)) == Interval(0, 4)

    def test_sqrt_clips_domain(self):
        assert ia.sqrt(Interval(-1, 4)) == Interval(0, 2)

    def test_exp_contains_e(self):
        r = ia.exp(Interval(0, 1))
        e = Fraction(Decimal(1).exp())
        assert r.lo <= 1.0 and Fraction(r.hi) >= e
        assert r.hi - math.e <= 4 * math.ulp(math.e)

    def test_log_of_negative_is_empty(self):
        assert ia.log(Interval(-3, -1)).is_empty

    def test_sqrt_of_negative_is_empty(self):
        assert ia.sqrt(Interval(-3, -1)).is_empty


class TestDivision:
    def test_divisor_with_zero_gives_unbounded(self):
        r = Interval(1, 2) / Interval(-1, 1)
        assert r == ENTIRE

    def test_divisor_zero_endpoint_gives_half_line(self):
        r = Interval(1, 2) / Interval(0, 1)
        assert r.lo == 1.0 and r.hi == math.inf

    def test_zero_numerator(self):
        assert Interval(0, 0) / Interval(-1, 1) == Interval(0, 0)

    def test_point_zero_divisor(self):
        assert (Interval(1, 2) / Interval(0, 0)).is_empty


class TestEmpty:
    @pytest.mark.parametrize("op", ["+", "-", "*", "/"])
    def test_binary_propagates(self, op):
        assert interval_binary(op, EMPTY, Interval(1, 2)).is_empty
        assert interval_binary(op, Interval(1, 2), EMPTY).is_empty

    @pytest.mark.parametrize("op", ["neg", "sqr", "sqrt", "exp", "log", "sin", "cos"])
    def test_unary_propagates(self, op):
        assert interval_unary(op, EMPTY).is_empty

    def test_pow_propagates(self):
        assert interval_unary("pow_int", EMPTY, 3).is_empty


class TestTrig:
    def test_sin_hits_extrema(self):
        r = ia.sin(Interval(0, 4))
        assert r.hi == 1.0 and r.lo < -0.75

    def test_cos_full_period(self):
        assert ia.cos(Interval(-10, 10)) == Interval(-1, 1)

    def test_cos_near_pi(self):
        r = ia.cos(Interval(3, 3.2))
        assert r.lo == -1.0


class TestPow:
    @pytest.mark.parametrize(
        "iv,n,expected",
        [
            (Interval(-2, 1), 2, Interval(0, 4)),
            (Interval(-2, 1), 3, Interval(-8, 1)),
            (Interval(2, 3), -1, Interval(1 / 3, 0.5)),
            (Interval(-1, 2), 0, Interval(1, 1)),
        ],
    )
    def test_ranges(self, iv, n, expected):
        r = ia.pow_int(iv, n)
        assert r.lo <= expected.lo and r.hi >= expected.hi
        assert r.width <= expected.width + 1e-15


class TestContainment:
    @given(interval_and_point(), interval_and_point(), st.sampled_from(["+", "-", "*", "/"]))
    def test_binary(self, ax, by, op):
        (a, x), (b, y) = ax, by
        if op == "/" and y == 0.0:
            return
        r = interval_binary(op, a, b)
        fx, fy = Fraction(x), Fraction(y)
        exact = {"+": fx + fy, "-": fx - fy, "*": fx * fy, "/": fx / fy if fy else None}[op]
        assert not r.is_empty and r.lo <= r.hi
        assert encloses(r, exact)

    @given(interval_and_point(-50, 50))
    def test_exp(self, ax):
        a, x = ax
        assert encloses(ia.exp(a), Fraction(Decimal(x).exp()))

    @given(interval_and_point(1e-300, 1e6))
    def test_log_and_sqrt(self, ax):
        a, x = ax
        assert encloses(ia.log(a), Fraction(Decimal(x).ln()))
        assert encloses(ia.sqrt(a), Fraction(Decimal(x).sqrt()))

    @given(interval_and_point(-1e3, 1e3), st.integers(min_value=-4, max_value=5))
    def test_pow(self, ax, n):
        a, x = ax
        if n < 0 and x == 0.0:
            return
        assert encloses(ia.pow_int(a, n), Fraction(x) ** n)


class TestMonotonicity:
    @given(intervals(), intervals(), intervals(), intervals(), st.sampled_from(["+", "-", "*", "/"]))
    def test_inclusion_isotone(self, a, a2, b, b2, op):
        big_a, big_b = a | a2, b | b2
        small = interval_binary(op, a, b)
        large = interval_binary(op, big_a, big_b)
        assert small.subset(large)

    @given(intervals(-30, 30), intervals(-30, 30), st.sampled_from(["sqr", "exp", "sin", "cos", "neg"]))
    def test_unary_isotone(self, a, a2, op):
        assert interval_unary(op, a).subset(interval_unary(op, a | a2))


class TestRounding:
    def test_inexact_sum_is_widened(self):
        r = Interval(0.1, 0.1) + Interval(0.2, 0.2)
        assert r.lo < r.hi
        assert encloses(r, Fraction(0.1) + Fraction(0.2))

    def test_exact_sum_is_not_widened(self):
        assert Interval(0.5, 0.5) + Interval(0.25, 0.25) == Interval(0.75, 0.75)

    def test_overflow_goes_to_infinity(self):
        big = Interval(1e308, 1e308)
        r = big * Interval(10, 10)
        assert r.hi == math.inf and r.lo <= r.hi

    @pytest.mark.parametrize(
        "f,a,b",
        [
            (ia.mul_down, 1e-270, 1e-270),
            (ia.mul_down, -1e-270, -1e-270),
            (ia.mul_up, -1e-270, 1e-270),
            (ia.div_down, 1e-300, 1e300),
            (ia.div_up, -1e-300, 1e300),
        ],
    )
    def test_underflow_does_not_cross_zero(self, f, a, b):
        assert f(a, b) == 0.0

    def test_square_of_tiny_positive_is_nonnegative(self):
        assert ia.sqr(Interval(1e-270, 1.0)).lo == 0.0


class TestBox:
    def test_width(self):
        assert Box([(0, 1), (0, 3)]).width() == 3

    def test_intersect(self):
        assert Box([(0, 2)]).intersect(Box([(1, 3)])) == Box([(1, 2)])

    def test_disjoint_intersect_is_empty(self):
        assert Box([(0, 1)]).intersect(Box([(2, 3)])).is_empty

    def test_hull(self):
        assert Box([(0, 1)]).hull(Box([(2, 3)])) == Box([(0, 3)])

    def test_midpoint_clamped_for_unbounded(self):
        m = Box([(-math.inf, math.inf), (0, math.inf), (-1, 1)]).midpoint()
        assert all(math.isfinite(v) for v in m) and m[2] == 0.0

    def test_relative_width_tie_goes_to_lowest(self):
        assert Box([(0, 1), (0, 1)]).max_relative_width_index() == 0

    def test_relative_width_prefers_wide(self):
        assert Box([(0, 1), (0, 4)]).max_relative_width_index() == 1

    def test_empty_box(self):
        b = Box([(0, 1), EMPTY])
        assert b.is_empty and b.volume() == 0.0

    @given(st.lists(intervals(-10, 10), min_size=1, max_size=4))
    def test_midpoint_inside(self, ivs):
        b = Box(ivs)
        assert b.contains_point(b.midpoint())
