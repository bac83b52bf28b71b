"""The space-time extension at order s = 3/2: subordinated solution,
quadratic trace rate, kernel annihilation, and the trace identity with
constant K(3/2) = 1/2.

Run:  python3 demos/higher_order_extension.py   (takes ~1 minute)
"""

import math

import numpy as np

from fraxion.extension import (
    annihilation_residual,
    dtn_higher,
    kernel_mass,
    solve_higher,
)
from fraxion.field import GridSpec, SpaceTimeTestFunction, gaussian
from fraxion.fracops import fracheat_multiplier_oracle, k_constant

s = 1.5
grid = GridSpec(1, 128, 12.0, time_points=256, time_half_width=16.0)
f = SpaceTimeTestFunction(gaussian(math.pi), ct=math.pi).sample(grid)

print(f"trace constant K({s}) = {k_constant(s):.6f}  (exactly 1/2)")
print(f"kernel mass: {kernel_mass('higher', 1, s, 0.25):.9f}")

res = annihilation_residual(s, (0.3, 0.8, 0.5), delta=5e-3)
print(f"kernel annihilation residual (two operator applications): {res:.2e}")

sol = solve_higher(f, s)
tmask = np.abs(grid.time_axis()) <= 4.0
errs = [
    float(np.sqrt(np.mean(np.abs(r.samples[:, tmask] - f.samples[:, tmask]) ** 2)))
    for r in sol.rungs
]
slope = np.polyfit(np.log(sol.y_ladder[2:]), np.log(errs[2:]), 1)[0]
print("trace L2 error down the ladder: " + "  ".join(f"{e:.1e}" for e in errs))
print(f"fitted trace rate: y^{slope:.2f}  (theory: quadratic)")

trace = dtn_higher(sol, f, s)
oracle = fracheat_multiplier_oracle(f, s)
sel = np.ix_(
    np.where(np.abs(grid.axis()) <= 6.0)[0], np.where(tmask)[0]
)
sup = float(np.max(np.abs(oracle.samples[sel])))
gap = float(np.max(np.abs(trace.samples[sel] - oracle.samples[sel]))) / sup
print(f"trace vs the symbol oracle (interior, sup-relative): {gap:.2e}")
