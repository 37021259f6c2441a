"""
Linear relaxation and a safe LP bound
=====================================

Over a box, each nonlinear function is bracketed by linear cuts.  The LP
over those cuts is solved in floating point.  Its duals are then turned
into a lower bound that holds despite rounding, by evaluating the
Lagrangian in interval arithmetic.
"""

from safebnb import linearize, parse_problem, safe_lower_bound, simplex_solve
from safebnb.interval import Box

p = parse_problem("var x in [-2,2]; var y in [-2,2]; min x + y; subject x^2 + y^2 - 1 = 0;")
box = Box([(-1, 0), (-1, 0)])

lp = linearize(p, box)
for row, rhs, sense, tag in zip(lp.A, lp.b, lp.senses, lp.tags):
    print(f"{tag:>22}: {row} {sense} {rhs:.6g}")

sol = simplex_solve(lp)
print("LP status:", sol.status, " value:", sol.objective_value, " x_lp:", sol.primal[:2])
print("safe lower bound:", safe_lower_bound(lp, sol))

# a wrong-signed multiplier makes the bound collapse to -inf instead of lying
sol.duals = -sol.duals
print("with flipped duals:", safe_lower_bound(lp, sol))
