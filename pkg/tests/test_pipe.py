import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fronttrack.pipe import (JunctionComb, PipeProfile, SonicBreakdown, bernoulli, box_bound, invariant_defect,
                             isentropic_system, junction_determinant, junction_psi, limit_study, phi_a,
                             phi_a_invariant, pipe_source, solve_a_riemann, stationary_profile)
from fronttrack.piecewise import PiecewiseConstant

E = isentropic_system()


def test_phi_a_expansion_values():
    # [DERIVED] a q = const gives q = 0.3 / 1.2 = 0.25; Bernoulli v^2/2 + 2 rho = 2.045
    # then fixes rho = 1.0070943617060217 on the subsonic branch
    u = phi_a(E, math.log(1.2), [1.0, 0.3])
    assert u == pytest.approx([1.0070943617060217, 0.25], abs=1e-8)


def test_phi_a_second_ratio():
    # [DERIVED] from (1.1, 0.2) over a ratio 1.5: q = 0.2 / 1.5, rho = 1.1046220423942656
    u = phi_a_invariant(E, math.log(1.5), [1.1, 0.2])
    assert u == pytest.approx([1.1046220423942656, 0.2 / 1.5], abs=1e-12)


def test_phi_a_at_rest_and_identity():
    assert np.array_equal(phi_a(E, 0.4, [1.0, 0.0]), [1.0, 0.0])
    assert np.array_equal(phi_a(E, 0.0, [1.0, 0.3]), [1.0, 0.3])


def test_sonic_breakdown_on_strong_contraction():
    # [DERIVED] (0.6, 0.45) into half the section: q = 0.9, sonic rho = (0.81 / 2)^(1/3) ~ 0.740,
    # where Bernoulli already exceeds 0.28125 + 1.2, so no subsonic state exists
    with pytest.raises(SonicBreakdown):
        phi_a_invariant(E, math.log(0.5), [0.6, 0.45])
    with pytest.raises(SonicBreakdown):
        phi_a(E, math.log(0.5), [0.6, 0.45])


def test_junction_psi_vanishes_on_junction_pairs():
    u1 = np.array([1.0, 0.3])
    u2 = phi_a(E, math.log(1.2), u1)
    assert np.linalg.norm(junction_psi(E, u1, u2, 1.0, 1.2)) < 1e-14


def test_junction_determinant_nonzero():
    # frozen from a central-difference evaluation; subsonic flow keeps it away from zero
    assert junction_determinant(E, [1.0, 0.3], 1.0, 1.2) == pytest.approx(0.852, abs=5e-3)


def test_equal_sections_give_homogeneous_solution():
    ul, ur = np.array([1.2, 0.3]), np.array([1.0, 0.2])
    pat = solve_a_riemann(E, 1.0, 1.0, ul, ur)
    assert np.allclose(pat.u_minus, pat.u_plus)
    assert JunctionComb(E, 1.0, 1.0).keys == ()


def test_a_riemann_pattern_has_junction_pair():
    pat = solve_a_riemann(E, 1.0, 1.2, [1.1, 0.2], [1.0, 0.1])
    assert np.linalg.norm(junction_psi(E, pat.u_minus, pat.u_plus, 1.0, 1.2)) < 1e-9


def test_pipe_profile_shape():
    p = PipeProfile(1.0, 1.2, l=0.4)
    assert p.area(-1.0) == 1.0 and p.area(1.0) == pytest.approx(1.2)
    # [DERIVED] smoothstep is 1/2 at the midpoint
    assert p.area(0.0) == pytest.approx(1.1)
    jump = PipeProfile(1.0, 1.2)
    assert jump.area(-1e-12) == 1.0 and jump.area(0.0) == 1.2
    with pytest.raises(ValueError):
        PipeProfile(0.0, 1.0)


def test_pipe_source_total_mass():
    # [DERIVED] int |(ln a)'| = ln 1.2 for a monotone section, scaled by the bound K on G
    src = pipe_source(E, PipeProfile(1.0, 1.2, l=0.5))
    assert src.omega_l1 == pytest.approx(max(box_bound(E)) * math.log(1.2), rel=1e-10)


def test_stationary_profile_keeps_invariants():
    pipe = PipeProfile(1.0, 1.2, l=0.5)
    data, _ = stationary_profile(E, pipe, [1.0, 0.3])
    xs = np.linspace(-0.3, 0.3, 13)
    u = data(xs)
    a = pipe.area(xs)
    assert np.allclose(a * u[:, 1], 0.3, atol=1e-9)
    assert np.allclose([bernoulli(E, v) for v in u], bernoulli(E, [1.0, 0.3]), atol=1e-9)


def test_limit_study_with_equal_sections_is_trivial():
    u0 = PiecewiseConstant.riemann(0.0, [1.1, 0.2], [1.0, 0.1])
    study = limit_study(E, 1.0, 1.0, u0, [0.4, 0.2], 0.2, [0.04, 0.04])
    assert np.allclose(study.distances(), 0.0, atol=1e-12)
    assert study.junction_residual == 0.0
    assert study.to_csv().startswith("l,eps,h,")


@settings(max_examples=40, deadline=None)
@given(st.floats(0.9, 1.3), st.floats(-0.3, 0.3), st.floats(0.8, 1.25))
def test_ode_and_invariant_maps_agree(rho, q, ratio):
    u = np.array([rho, q])
    a = phi_a(E, math.log(ratio), u)
    b = phi_a_invariant(E, math.log(ratio), u)
    assert np.allclose(a, b, atol=1e-8)
    assert invariant_defect(E, 1.0, u, ratio, a) < 1e-8
