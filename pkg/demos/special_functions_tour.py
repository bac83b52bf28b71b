"""A quick tour of the special-function layer.

Run:  python3 demos/special_functions_tour.py
"""

import math

from fraxion.specfun import bessel, beta, gamma, hyp2f1, pochhammer

print("gamma anchors")
print(f"  gamma(1/2)            = {gamma(0.5).value.real:.12f}  (sqrt(pi) = {math.sqrt(math.pi):.12f})")
print(f"  gamma(5)              = {gamma(5.0).value.real:.12f}  (4! = 24)")
print(f"  gamma(1/4) gamma(3/4) = {(gamma(0.25).value * gamma(0.75).value).real:.12f}"
      f"  (pi/sin(pi/4) = {math.pi / math.sin(math.pi / 4):.12f})")

print("\nbeta and Pochhammer")
print(f"  B(2,3)   = {beta(2, 3).value.real:.12f}  (1/12)")
print(f"  B(.5,.5) = {beta(0.5, 0.5).value.real:.12f}  (pi)")
print(f"  (3)_2    = {pochhammer(3.0, 2):.1f}, (0)_0 = {pochhammer(0.0, 0):.1f}, (0)_4 = {pochhammer(0.0, 4):.1f}")

print("\nBessel functions")
print(f"  J_1/2(pi/2) = {bessel('J', 0.5, math.pi / 2).value.real:.12f}  (2/pi = {2/math.pi:.12f})")
print(f"  K_1/2(1)    = {bessel('K', 0.5, 1.0).value.real:.12f}"
      f"  (sqrt(pi/2)/e = {math.sqrt(math.pi/2)*math.exp(-1):.12f})")
print(f"  J_0(1e-8)   = {bessel('J', 0.0, 1e-8).value.real:.15f}  (limit 1)")

z, v = 7.0, 1.5
g = lambda zz: zz ** (-v) * bessel("J", v, zz).value.real
fd = (g(z + 1e-5) - g(z - 1e-5)) / 2e-5
print(f"  recursion (z^-v J_v)' = -z^-v J_(v+1): FD {fd:.10f} vs "
      f"{-(z ** -v) * bessel('J', v + 1, z).value.real:.10f}")

print("\nGauss hypergeometric on the left half-line")
print(f"  F(2,5;5;-1)     = {hyp2f1(2, 5, 5, -1).value.real:.12f}  ((1+1)^-2 = 0.25)")
print(f"  F(1.2,.4;2.3;-7.5) = {hyp2f1(1.2, 0.4, 2.3, -7.5).value.real:.12f}  (Pfaff-transformed series)")
