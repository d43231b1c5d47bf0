import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

import corpus  # noqa: E402
from fronttrack.hriemann import solve_h_riemann, uniqueness_probe  # noqa: E402
from fronttrack.sources import ZeroSource, phi_h  # noqa: E402
from fronttrack.systems import solve_homogeneous_riemann  # noqa: E402


def test_zero_source_reduces_to_homogeneous():
    system, _, _ = corpus.euler_pipe()
    ul, ur = np.array([1.2, 0.3]), np.array([1.0, 0.2])
    pat = solve_h_riemann(system, ZeroSource(2), 0.0, 0.1, ul, ur)
    fan = solve_homogeneous_riemann(system, ul, ur)
    assert np.allclose(pat.sigma, fan.sigma, atol=1e-11)
    assert np.allclose(pat.u_minus, pat.u_plus)
    assert pat.sigma_zero == 0.0


def test_scalar_pattern_closed_form():
    # [DERIVED] f = 2u moves right, so the left fan is empty; Phi_h(0) = 0 + sqrt(0.04)/2 = 0.1
    # on the window [0, 0.04]; the right wave then brings 0.1 back down to u_r = 0
    system, src = corpus.linear_inverse_sqrt()
    pat = solve_h_riemann(system, src, 0.0, 0.04, [0.0], [0.0])
    assert len(pat.left) == 0
    assert pat.u_plus[0] == pytest.approx(0.1, abs=1e-14)
    assert pat.sigma[-1] == pytest.approx(-0.1, abs=1e-14)
    assert pat.sigma_zero == pytest.approx(0.2, abs=1e-14)


def test_compensating_data_has_no_waves():
    system, src, _ = corpus.euler_pipe()
    ul = np.array([1.0, 0.25])
    ur = phi_h(system, src, -0.1, 0.1, ul)
    pat = solve_h_riemann(system, src, -0.1, 0.1, ul, ur)
    assert np.allclose(pat.sigma, 0.0, atol=1e-11)


def test_speed_signs_and_self_similarity():
    system, src, _ = corpus.euler_pipe()
    pat = solve_h_riemann(system, src, 0.0, 0.1, [1.1, 0.2], [1.0, 0.1])
    assert all(hi < 0 for _, hi in pat.left.speeds)
    assert all(lo > 0 for lo, _ in pat.right.speeds)
    # right-continuous across the zero-wave
    assert np.allclose(pat.evaluate(1.0, 0.0), pat.u_plus)
    assert np.allclose(pat.evaluate(1.0, -1e-12), pat.u_minus)
    assert np.allclose(pat.evaluate(2.0, 0.4), pat.evaluate(1.0, 0.2))


def test_newton_solution_is_unique_locally():
    system, src, _ = corpus.euler_pipe()
    assert uniqueness_probe(system, src, -0.05, 0.1, [1.1, 0.2], [1.0, 0.1]) < 1e-9


def test_json_roundtrip_fields():
    system, src = corpus.burgers_state_source()
    d = solve_h_riemann(system, src, 0.0, 0.05, [0.1], [0.3]).to_dict()
    assert set(d) >= {"u_minus", "u_plus", "sigma", "sigma_zero", "left_kinds", "right_kinds"}


near = st.tuples(st.floats(0.9, 1.2), st.floats(-0.1, 0.3))


@settings(max_examples=60, deadline=None)
@given(near, near, st.floats(-0.5, 0.4), st.floats(0.01, 0.2))
def test_pattern_recomposes(a, b, x0, h):
    system, src, _ = corpus.euler_pipe()
    ul, ur = np.array(a), np.array(b)
    pat = solve_h_riemann(system, src, x0, h, ul, ur)
    assert pat.residual <= 1e-10
    assert np.allclose(phi_h(system, src, x0, h, pat.u_minus), pat.u_plus, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(near, near, st.floats(-0.5, 0.4), st.floats(0.01, 0.2))
def test_wave_sizes_track_the_jump(a, b, x0, h):
    # |u_l - u_r| and the total outgoing strength agree up to the zero-wave and a
    # moderate constant; 3 leaves room over the 1.84 seen on 1000 samples
    system, src, _ = corpus.euler_pipe()
    ul, ur = np.array(a), np.array(b)
    pat = solve_h_riemann(system, src, x0, h, ul, ur)
    jump, waves = np.linalg.norm(ul - ur), np.abs(pat.sigma).sum()
    assert jump <= 3.0 * (waves + pat.sigma_zero) + 1e-12
    assert waves <= 3.0 * (jump + pat.sigma_zero) + 1e-12
