"""
Minimum-norm Newton correction
==============================

An under-determined system g(x) = 0 has a whole manifold of solutions.
Each Moore-Penrose step solves the linearized system with the smallest
possible move, so the iteration lands close to its seed.  Residuals fall
quadratically.
"""

import numpy as np

from safebnb import feasibility_correction, moore_penrose_step, parse_problem

p = parse_problem("var x in [-2,2]; var y in [-2,2]; min x + y; subject x^2 + y^2 - 1 = 0;")

# a single step from (1.1, 0.9): parallel to the gradient
J = np.array([[2.2, 1.8]])
print("first step:", moore_penrose_step([1.02], J))

res = feasibility_correction(p, [1.1, 0.9], tol=1e-10)
print("converged:", res.converged, "in", res.iterations, "iterations")
for t, r in enumerate(res.history):
    print(f"  iteration {t}: residual {r:.3e}")
print("point:", res.point, " |x| =", np.linalg.norm(res.point))

# inequalities become equalities with squared slacks when they are nearly active
q = parse_problem("var x in [-3,3]; var y in [-3,3]; min x; subject x^2 + y^2 - 1 <= 0;")
res = feasibility_correction(q, [1.0, 0.5])
print("inequality case:", res.point, "h =", res.point @ res.point - 1)
