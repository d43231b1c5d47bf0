"""Gas in a pipe whose section widens from 1 to 1.2.

A smooth transition of length l is compared with the sharp junction
solved by the exact stationary map; the L1 gap shrinks with l.
"""

import math

from fronttrack.pipe import isentropic_system, junction_determinant, limit_study, phi_a, phi_a_invariant
from fronttrack.piecewise import PiecewiseConstant

E = isentropic_system()
u = [1.0, 0.3]
print("stationary map across the junction")
print("  ODE      :", phi_a(E, math.log(1.2), u))
print("  invariant:", phi_a_invariant(E, math.log(1.2), u))
print(f"  uniqueness determinant: {junction_determinant(E, u, 1.0, 1.2):.4f}")

u0 = PiecewiseConstant.riemann(-0.8, [1.05, 0.2], [1.0, 0.25])
study = limit_study(E, 1.0, 1.2, u0, [0.4, 0.2, 0.1, 0.05], 0.3, [0.02] * 4, workers=2)
print("\nl -> 0 limit against the sharp junction")
print(study.to_csv(), end="")
print(f"monotone: {study.is_monotone()}  junction residual: {study.junction_residual:.2e}")
