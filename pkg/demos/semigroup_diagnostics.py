"""The integral conditions and the semigroup defect on a Burgers run.

Condition (i) compares with the Riemann fan at a jump, condition (ii)
with the frozen linear problem; both ratios stay bounded as the window
shrinks.
"""

import numpy as np

from fronttrack.analysis import (Trajectory, condition_i_curve, condition_ii_check, fit_constant,
                                 halving_stability, semigroup_defect)
from fronttrack.piecewise import PiecewiseConstant
from fronttrack.sources import InverseSqrtProfile, SeparableSource
from fronttrack.systems import ShiftedBurgers

B = ShiftedBurgers()
src = SeparableSource.constant(InverseSqrtProfile(0.2, 0.0, 0.5), [1.0])
u0 = PiecewiseConstant([-0.6, 0.3], [[0.5], [-0.3], [0.2]])
traj = Trajectory(B, src, u0, 0.02, 0.05)

print("condition (i) at the jump x = -0.6, tau = 0")
for th, r in condition_i_curve(traj, 0.0, -0.6, [0.2, 0.1, 0.05, 0.025]):
    print(f"  theta={th:<6} ratio={r:.5f}")

rng = np.random.default_rng(7)
checks = []
for _ in range(12):
    xi = rng.uniform(-0.8, 0.8)
    checks.append(condition_ii_check(traj, rng.uniform(0.0, 0.3), xi - 0.6, xi + 0.6, xi, 0.05))
C, spread = halving_stability(checks)
print(f"\ncondition (ii): fitted C = {fit_constant(checks):.3f}, halving spread = {spread:.2f}")

print("\nsemigroup defect ||P_(t+s) u - P_t P_s u|| with t = 0.3, s = 0.2")
for eps, h in [(0.04, 0.1), (0.02, 0.05), (0.01, 0.025)]:
    d = semigroup_defect(B, src, u0, eps, h, 0.3, 0.2, (-2.0, 4.0))
    print(f"  eps={eps:<5} h={h:<6} defect={d:.5f}")
