"""
Outward-rounded interval arithmetic
===================================

Every operation returns an interval that encloses the exact real result,
even when the floating-point endpoints are inexact.
"""

from fractions import Fraction

from safebnb.interval import Box, Interval
import safebnb.interval as ia

# 0.1 + 0.2 is not exactly representable: the sum is widened by one ulp
r = Interval(0.1) + Interval(0.2)
print("0.1 + 0.2 ->", r, " exact value inside:", Fraction(r.lo) <= Fraction(0.1) + Fraction(0.2) <= Fraction(r.hi))

# exact sums stay exact
print("0.5 + 0.25 ->", Interval(0.5) + Interval(0.25))

# division by an interval that straddles zero gives the whole line
print("[1,2] / [-1,1] ->", Interval(1, 2) / Interval(-1, 1))
print("[1,2] / [0,1]  ->", Interval(1, 2) / Interval(0, 1))

# elementary functions respect their domains
print("sqrt([-1,4]) ->", ia.sqrt(Interval(-1, 4)))
print("log([-3,-1]) ->", ia.log(Interval(-3, -1)), "(empty)")
print("sin([0,4])   ->", ia.sin(Interval(0, 4)))

# boxes are products of intervals
b = Box([(0, 4), (0, 1)])
print("box", b, "width", b.width(), "volume", b.volume())
