"""
Expressions, derivatives and HC4 pruning
========================================

A problem file is parsed into expression tapes.  The same tape gives point
values, interval ranges and forward-mode gradients, and drives the HC4
contractor that narrows boxes without losing feasible points.
"""

from safebnb import eval_interval, eval_point, gradient_point, parse_problem, prune
from safebnb.expr import jacobian_interval

p = parse_problem(
    """
    var x in [-2, 2];
    var y in [-2, 2];
    min x + y;
    subject x^2 + y^2 - 1 = 0;
    """,
    name="circle",
)
g = p.equalities[0]

# point evaluation and the gradient by forward-mode AD
print("g(1.1, 0.9) =", eval_point(g, [1.1, 0.9]))
print("grad g(1.1, 0.9) =", gradient_point(g, [1.1, 0.9])[1])

# natural interval extension and the interval Jacobian over the domain
print("g over the domain:", eval_interval(g, p.domain))
print("interval Jacobian:", jacobian_interval([g], p.domain)[0])

# HC4 shrinks the domain to the unit square
print("pruned domain:", prune(p, p.domain))

# with an objective cut x + y <= -1.3 only the lower-left arc survives
print("pruned with U = -1.3:", prune(p, p.domain, upper=-1.3))
