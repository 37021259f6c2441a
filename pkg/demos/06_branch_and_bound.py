"""
Safe branch and bound
=====================

The solver alternates pruning, a safe LP lower bound and an upper-bounding
step on each box.  The default strategy corrects the LP solution and
proves a box around it.  It stops once the certified gap U - L is below eps.
"""

import math

from safebnb import branch_and_bound, parse_problem

p = parse_problem(
    "var x in [-2,2]; var y in [-2,2]; min x + y; subject x^2 + y^2 - 1 = 0;",
    name="circle",
)
r = branch_and_bound(p, eps=1e-6, strategy="S3")
print(f"status {r.status} after {r.nodes} nodes in {r.wall_time:.3f}s")
print(f"[L, U] = [{r.L!r}, {r.U!r}]   gap {r.gap:.2e}")
print("true optimum -sqrt(2) inside:", r.L <= -math.sqrt(2) <= r.U)

print("\nfirst iterations:")
for rec in r.log[:8]:
    print(f"  {rec.iteration:3d}  L={rec.L: .9f}  U={rec.U: .9f}  {', '.join(rec.events)}")

# an infeasible problem empties the worklist
q = parse_problem("var x in [-10,10]; min x; subject x^2 + 1 = 0;")
print("\nx^2 + 1 = 0:", branch_and_bound(q).status)
