"""
Transportation costs under interval uncertainty
===============================================

Solve one transportation problem exactly, then ask how expensive it can get
when demands and capacities are only known up to intervals.
"""

import numpy as np

from locbench import generate
from locbench.instances import TransportInstance
from locbench.transport import itp_bisection, itp_oracle, solve_tp

# A small integer instance. Supply duals are <= 0, and the dual objective
# equals the primal cost.
tp = generate("tp", seed=1, n=3, m=4)
sol = solve_tp(tp)
print("costs\n", tp.costs)
print("flows\n", sol.flows)
print("cost", sol.objective, "dual value", sol.dual_value(tp.supplies, tp.demands))

# Interval version: each demand and capacity lives in a box. The worst case
# sits on a vertex of the feasible region, so the oracle simply visits them.
itp = generate("itp", seed=4, n=3, m=3)
exact = itp_oracle(itp)
print(f"\nworst-case cost {exact.value:g} over {exact.iterations} vertices")
print("  demands", exact.d, "capacities", exact.q)

# The bisection scheme only ever certifies lower bounds. Both variants should
# land on the oracle value here.
for v in ("A", "B"):
    res = itp_bisection(itp, v)
    print(f"bisection-{v}: {res.value:g} after {res.iterations} iterations, "
          f"{res.evaluated} TP solves")

# Raising one demand never makes shipping cheaper (spare capacity added first).
q = tp.supplies + 1
d = np.asarray(tp.demands, float).copy()
d[0] += 1
before = solve_tp(TransportInstance(q, tp.demands, tp.costs)).objective
after = solve_tp(TransportInstance(q, d, tp.costs)).objective
print(f"\none more unit at sink 0: {before:g} -> {after:g}")
