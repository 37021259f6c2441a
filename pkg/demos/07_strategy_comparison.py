"""
Comparing upper-bounding strategies
===================================

S1 trusts the local-search guess without proof.  S2 proves a box around
the guess, and S4 corrects the guess first.  S5 proves directly around the
LP solution, and S3 corrects the LP solution first.  The table runs every
strategy on the bundled corpus under a shared node budget.
"""

import statistics

from safebnb import SolverConfig, branch_and_bound
from safebnb.corpus import load_corpus

corpus = load_corpus()
print(f"{'problem':>20} " + " ".join(f"{s:>14}" for s in ("S1", "S2", "S3", "S4", "S5")))
totals = {s: [0, 0, []] for s in ("S1", "S2", "S3", "S4", "S5")}
for p in corpus:
    cells = []
    for s in totals:
        r = branch_and_bound(p, config=SolverConfig(strategy=s, max_nodes=2000))
        totals[s][0] += r.proof_successes
        totals[s][1] += r.nodes
        totals[s][2].append(r.time_to_first_proven or float("inf"))
        flag = "!" if r.unsafe and r.U < float(p.metadata["optimum"]) - 1e-9 else " "
        cells.append(f"{r.U:>12.6f}{flag} ")
    print(f"{p.name:>20} " + " ".join(cells))

print("\n(! marks an unsafe S1 value below the true optimum)")
for s, (succ, nodes, first) in totals.items():
    print(f"{s}: {succ:5d} proof successes, {nodes:6d} nodes, median first proof {statistics.median(first):.4f}s")
