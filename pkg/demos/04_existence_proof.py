"""
Proving a box contains a feasible point
=======================================

A corrected point is only approximately feasible.  Epsilon-inflation grows
a box around it until the Krawczyk test proves that an exact solution
lies inside.  The interval objective over that box then gives a rigorous
upper bound on the global minimum.
"""

import json

from safebnb import feasibility_correction, inflate_and_prove, parse_problem, replay_certificate

p = parse_problem("var x in [-2,2]; var y in [-2,2]; min x + y; subject x^2 + y^2 - 1 = 0;")

x_corr = feasibility_correction(p, [-0.72, -0.70]).point
pb = inflate_and_prove(p, x_corr)
print("proven box:", pb.box)
print("objective range:", pb.objective_range, "-> U =", pb.upper)
print("inflation rounds:", pb.certificate.rounds, " unknowns:", pb.certificate.unknowns)

# the certificate is plain data and can be re-checked later
blob = json.dumps(pb.certificate.to_dict())
print("replay from JSON:", replay_certificate(json.loads(blob), p))

# an infeasible system is never proven
bad = parse_problem("var x in [-10,10]; min x; subject x^2 + 1 = 0;")
print("x^2 + 1 = 0:", inflate_and_prove(bad, [0.0]))
