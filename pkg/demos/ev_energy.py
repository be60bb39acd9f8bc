"""
Energy-minimal driving of an electric vehicle
=============================================

Reach a target distance within a fixed horizon while spending as little
battery energy as possible. The control is the switch setting in [-1, 1].
"""

import numpy as np

from locbench import generate
from locbench.ev_dp import control_bounds, dp_solve, enumerate_controls, simulate_policy
from locbench.instances import EvModel, EvState

model = EvModel.with_reference_constants(F=2.0, P=5.0, R=0.3)
print(f"{model.T} periods of {model.delta}s, target {model.P} m")

# From rest the induction bound only allows half throttle.
print("admissible controls at rest:", control_bounds(EvState(), model))

full = simulate_policy(model, lambda s, lo, hi: hi)
print(f"always the highest admissible control: p = {full.final.p:.2f} m, E = {full.energy:.0f}")

# The dynamic program gets better as the state grid is refined.
for g in (11, 21, 41):
    tr = dp_solve(model, grid=(g, g, g), controls=21)
    print(f"grid {g}^3: E = {tr.energy:.0f}, p_T = {tr.final.p:.2f} m")

# On a short horizon the DP can be compared with exhaustive search.
short = generate("evdp", seed=0, F=0.5)
levels = [-1.0, 0.0, 1.0]
best = enumerate_controls(short, levels)
dp = dp_solve(short, controls=levels)
print(f"\nT={short.T}: enumeration E = {best.energy:.3f}, DP E = {dp.energy:.3f}")
print("controls", np.round(dp.controls, 4))
