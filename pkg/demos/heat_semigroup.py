"""Heat semigroup structure on the grid: composition, contraction, the
peak bound, and subordination to the Newtonian potential.

Run:  python3 demos/heat_semigroup.py
"""

import math

import numpy as np

from fraxion.field import GridSpec, convolve, gaussian, grid_norm
from fraxion.heatsg import (
    apply_pt,
    heat_kernel,
    newtonian_constant,
    sample_heat_kernel,
    subordination_newtonian,
)

grid = GridSpec(1, 256, 12.0)

print(f"kernel peak anchor: G(0, 1/(4 pi)) = {heat_kernel([0.0], 1/(4*math.pi), 1):.12f}")

k_half = sample_heat_kernel(grid, 0.5)
k_one = sample_heat_kernel(grid, 1.0)
comp = convolve(k_half, k_half)
print(f"kernel composition G(.,1/2)*G(.,1/2) vs G(.,1): "
      f"{np.max(np.abs(comp.samples - k_one.samples)):.2e}")

u = gaussian(0.25).sample(grid)
print("\ncontraction of P_t in L^1, L^2, L^inf:")
for t in (0.1, 1.0, 10.0):
    ratios = [grid_norm(apply_pt(u, t), p) / grid_norm(u, p) for p in (1, 2, "inf")]
    print(f"  t={t:5.1f}: " + "  ".join(f"{r:.6f}" for r in ratios))

peaked = gaussian(1024.0).sample(grid)
t = 0.5
peak = grid_norm(apply_pt(peaked, t), "inf")
bound = (4 * math.pi * t) ** -0.5 * grid_norm(peaked, 1)
print(f"\npeak bound at t={t}: |P_t f|_inf = {peak:.6f} vs (4 pi t)^-1/2 |f|_1 = {bound:.6f}")

print("\ntime-integrated heat kernel vs the Newtonian kernel (n=3):")
for r in (1.0, 2.0):
    got = subordination_newtonian([r, 0.0, 0.0], 3)
    exact = newtonian_constant(3) / r
    print(f"  |x|={r}: {got:.10f} vs {exact:.10f}")
