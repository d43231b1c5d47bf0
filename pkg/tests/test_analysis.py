import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import corpus  # noqa: E402
from fronttrack.analysis import (ConditionII, LinearLocalProblem, Trajectory, as_function_data,  # noqa: E402
                                 condition_i_curve, condition_ii_check, determinacy_distance, fit_constant,
                                 halving_stability, lipschitz_matrix, riemann_distance, scheme_error,
                                 semigroup_defect, time_lipschitz, u_flat, u_sharp)
from fronttrack.piecewise import PiecewiseConstant  # noqa: E402
from fronttrack.sources import ZeroSource  # noqa: E402
from fronttrack.systems import ShiftedBurgers  # noqa: E402

B = ShiftedBurgers()


def test_u_sharp_is_the_rarefaction_fan():
    # [DERIVED] f' = u + 2; at (x - xi)/theta = 2.1 the fan from -0.5 to 0.5 holds 0.1
    u = PiecewiseConstant.riemann(0.0, [-0.5], [0.5])
    assert u_sharp(B, u, 0.0, 1.0, [2.1])[0, 0] == pytest.approx(0.1, abs=1e-12)
    assert u_sharp(B, u, 0.0, 1.0, [-5.0])[0, 0] == -0.5


def test_u_flat_linear_transport_with_source():
    # [DERIVED] w = u0(x - 2 theta) + (1/2) int_{x - 2 theta}^{x} 1/(2 sqrt s) ds;
    # with u0 = 0, x = 0.5, theta = 0.1 this is (sqrt 0.5 - sqrt 0.3) / 2
    system, src = corpus.linear_inverse_sqrt()
    u = PiecewiseConstant.constant([0.0])
    got = u_flat(system, src, u, 0.5, 0.1, [0.5])[0, 0]
    assert got == pytest.approx((math.sqrt(0.5) - math.sqrt(0.3)) / 2.0, abs=1e-14)


def test_w_h_collects_comb_jumps():
    # [DERIVED] comb points 0.4 and 0.5 lie in (x - 2t, x) = (0.35, 0.55); their windows
    # carry int_{0.4}^{0.6} 1/(2 sqrt s) = sqrt 0.6 - sqrt 0.4, divided by the speed 2
    system, src = corpus.linear_inverse_sqrt()
    prob = LinearLocalProblem(system, src, [0.0])
    got = prob.w_h(PiecewiseConstant.constant([0.0]), 0.1, 0.1, [0.55])[0, 0]
    assert got == pytest.approx((math.sqrt(0.6) - math.sqrt(0.4)) / 2.0, abs=1e-14)
    # [DERIVED] the jump at jh = 0 is (1/2) int_0^0.1 = sqrt(0.1)/2
    assert prob.zero_jump(0.1, 0)[0] == pytest.approx(math.sqrt(0.1) / 2.0)


def test_vanishing_speed_is_rejected():
    # a frozen matrix with a zero eigenvalue cannot even be built: the system refuses it
    from fronttrack.systems import LinearScalar
    with pytest.raises(ValueError, match="vanishes"):
        LinearLocalProblem(LinearScalar(0.0, -1.0, 1.0), ZeroSource(1), [0.0])


def test_condition_i_vanishes_on_an_exact_shock():
    traj = Trajectory(B, ZeroSource(1), PiecewiseConstant.riemann(0.0, [0.4], [0.0]), 0.05, 0.1)
    curve = condition_i_curve(traj, 0.0, 0.0, [0.05, 0.1, 0.2])
    assert [th for th, _ in curve] == [0.05, 0.1, 0.2]
    assert max(d for _, d in curve) < 1e-12


def test_condition_ii_window_validation():
    traj = Trajectory(B, ZeroSource(1), PiecewiseConstant.riemann(0.0, [0.4], [0.0]), 0.05, 0.1)
    with pytest.raises(ValueError):
        condition_ii_check(traj, 0.0, -1.0, 1.0, 2.0, 0.1)
    with pytest.raises(ValueError):
        condition_ii_check(traj, 0.0, -1.0, 1.0, 0.0, 1.0)


def test_condition_ii_on_a_constant_state():
    # constant data: the linear comparison is exact, both sides vanish
    traj = Trajectory(B, ZeroSource(1), PiecewiseConstant.constant([0.2]), 0.05, 0.1)
    c = condition_ii_check(traj, 0.0, -1.0, 1.0, 0.0, 0.1)
    assert c.lhs == 0.0 and c.bound_factor == 0.0 and c.ratio == 0.0


def test_fit_constant_and_halving():
    checks = [ConditionII(1.0, 1.0), ConditionII(4.0, 2.0), ConditionII(0.0, 0.0), ConditionII(0.5, 1.0)]
    assert fit_constant(checks) == 2.0
    full, spread = halving_stability(checks, trials=10)
    assert full == 2.0 and 0.0 <= spread <= 1.0


def test_riemann_distance():
    # [DERIVED] the exact shock 0.4 -> 0 moves at 2.2; a speed of 2.3 misplaces 0.4 on a width 0.1
    assert riemann_distance(B, [0.4], [0.0], 2.2) == pytest.approx(0.0, abs=1e-12)
    assert riemann_distance(B, [0.4], [0.0], 2.3) == pytest.approx(0.04, abs=1e-12)


def test_scheme_error_scale():
    # [DERIVED] eps_tilde for 1/(2 sqrt|x|) is sqrt(2h) = 0.2 at h = 0.02; (b - a) = 2
    _, src = corpus.linear_inverse_sqrt()
    assert scheme_error(src, 0.1, 0.02, -1.0, 1.0) == pytest.approx(2.0 * 0.3, rel=1e-8)
    assert scheme_error(None, 0.1, 0.02, -1.0, 1.0) == pytest.approx(0.2)


def test_time_lipschitz_of_a_shock():
    # [DERIVED] a jump of 0.4 moving at 2.2 sweeps 0.88 per unit time
    traj = Trajectory(B, ZeroSource(1), PiecewiseConstant.riemann(0.0, [0.4], [0.0]), 0.05, 0.1)
    assert time_lipschitz(traj, [0.0, 0.1, 0.3], (-5.0, 5.0)) == pytest.approx(0.88, abs=1e-12)


def test_lipschitz_matrix_constant_states():
    # [DERIVED] constants 0.1 and 0.2 differ by 0.2 on [-1, 1]; equal times give ratio 1
    u, v = PiecewiseConstant.constant([0.1]), PiecewiseConstant.constant([0.2])
    fit = lipschitz_matrix(B, ZeroSource(1), [(u, v)], [(0.5, 0.5)], 0.05, 0.1, (-1.0, 1.0))
    assert fit.L == pytest.approx(1.0)


def test_semigroup_defect_at_zero_shift():
    u0 = PiecewiseConstant([-0.5, 0.0, 0.6], [[0.6], [-0.2], [0.4], [-0.5]])
    exact = semigroup_defect(B, ZeroSource(1), u0, 0.05, 0.1, 0.5, 0.0, (-3.0, 5.0), resample=False)
    assert exact < 1e-12
    # a re-sampled restart costs at most the re-sampling error, which is at most eps
    resampled = semigroup_defect(B, ZeroSource(1), u0, 0.05, 0.1, 0.5, 0.0, (-3.0, 5.0))
    assert resampled <= 0.05 * (1 + 1e-9)


def test_as_function_data_padding():
    u = PiecewiseConstant([0.0, 1.0], [[1.0], [2.0], [3.0]])
    d = as_function_data(u, pad=0.5)
    assert d(np.array([-0.25]))[0, 0] == 1.0 and d(np.array([1.25]))[0, 0] == 3.0
    with pytest.raises(ValueError):
        as_function_data(u, pad=0.0)


def test_trajectory_cache_and_rewind():
    traj = Trajectory(B, ZeroSource(1), PiecewiseConstant.riemann(0.0, [0.4], [0.0]), 0.05, 0.1)
    late = traj.at(0.5)
    assert traj.at(0.5) is late
    early = traj.at(0.2)
    assert early.fronts[0].x == pytest.approx(0.44, abs=1e-12)


def test_determinacy_distance_shrinks_the_window():
    a = Trajectory(B, ZeroSource(1), PiecewiseConstant.constant([0.1]), 0.05, 0.1).at(0.5)
    b = Trajectory(B, ZeroSource(1), PiecewiseConstant.constant([0.2]), 0.05, 0.1).at(0.5)
    # [DERIVED] lam_hat = 6 for the shifted Burgers box, so [-4 + 3, 4 - 3] has width 2
    assert determinacy_distance(a, b, -4.0, 4.0, 6.0) == pytest.approx(0.2)
    assert determinacy_distance(a, b, -1.0, 1.0, 6.0) == 0.0
