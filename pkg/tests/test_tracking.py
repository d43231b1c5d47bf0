import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

import corpus  # noqa: E402
from fronttrack.piecewise import PiecewiseConstant  # noqa: E402
from fronttrack.pipe import isentropic_system  # noqa: E402
from fronttrack.sources import ZeroSource, phi_h  # noqa: E402
from fronttrack.systems import ShiftedBurgers, solve_homogeneous_riemann  # noqa: E402
from fronttrack.tracking import (DiracComb, FrontTracker, FrontTrackingError, TrackerConfig, advance,  # noqa: E402
                                 build_initial, glimm_report, solve)

B = ShiftedBurgers()


def invariants(fs, comb=None, eps=None):
    """Chained states, ordered positions, NP speed and budget, comb consistency."""
    fr = fs.fronts
    for a, b in zip(fr, fr[1:]):
        assert np.array_equal(a.ur, b.ul)
        assert a.x <= b.x + 1e-12
    for f in fr:
        if f.kind == "nonphysical":
            assert f.speed == pytest.approx(2.0 * fs.system.speed_bound())
        if f.kind == "zero" and comb is not None:
            assert f.x == pytest.approx(comb.position(f.key))
            assert np.allclose(comb.jump(f.key, f.ul), f.ur, atol=1e-10)
    if eps is not None:
        assert fs.np_strength() <= eps * (1 + 1e-9)


def test_constant_state_has_no_fronts():
    fs = solve(B, ZeroSource(1), PiecewiseConstant.constant([0.3]), 0.05, 0.1, 1.0)
    assert fs.fronts == () and fs.evaluate(0.0)[0] == 0.3


def test_single_shock_position():
    # [DERIVED] shock from 0.4 to 0 moves at 2.2: at t = 1 it sits at 0.1 + 2.2 = 2.3
    fs = solve(B, ZeroSource(1), PiecewiseConstant.riemann(0.1, [0.4], [0.0]), 0.05, 0.1, 1.0)
    assert len(fs.fronts) == 1 and fs.fronts[0].kind == "shock"
    assert fs.fronts[0].x == pytest.approx(2.3, abs=1e-13)
    assert fs.evaluate(2.3 + 1e-9)[0] == 0.0 and fs.left_limit(2.3 - 1e-9)[0] == 0.4


def test_two_shocks_merge():
    # [DERIVED] speeds (f(0.8) - f(0.4))/0.4 = 2.6 and 2.2; they meet at t = 0.5/0.4 = 1.25,
    # x = 3.25; the merged shock 0.8 -> 0 moves at 1.92/0.8 = 2.4, so at t = 2 it is at 5.05
    u0 = PiecewiseConstant([0.0, 0.5], [[0.8], [0.4], [0.0]])
    fs = solve(B, ZeroSource(1), u0, 0.05, 0.1, 2.0)
    assert len(fs.fronts) == 1
    assert fs.fronts[0].x == pytest.approx(5.05, abs=1e-12)
    assert fs.stats["events"] == 1


def test_rarefaction_is_split_into_eps_pieces():
    # [DERIVED] strength 0.5 with eps = 0.1 gives ceil(5) = 5 pieces
    fs = build_initial(B, ZeroSource(1), PiecewiseConstant.riemann(0.0, [-0.25], [0.25]), 0.1, 0.1)
    assert [f.kind for f in fs.fronts] == ["rarefaction"] * 5
    # each piece moves at the mean of its side speeds, within eps of the true characteristic speed
    for f in fs.fronts:
        assert abs(f.speed - (f.ur[0] + 2.0)) <= 0.1


def test_isentropic_riemann_converges_to_fan():
    E = isentropic_system()
    ul, ur = np.array([1.2, 0.3]), np.array([1.0, 0.2])
    fan = solve_homogeneous_riemann(E, ul, ur)
    exact = lambda x: fan.evaluate_many(np.asarray(x) / 1.0)
    edges = [s for sp in fan.speeds for s in sp]
    errs = []
    for eps in (0.04, 0.02, 0.01):
        fs = solve(E, ZeroSource(2), PiecewiseConstant.riemann(0.0, ul, ur), eps, 0.1, 1.0)
        errs.append(fs.to_piecewise().l1_distance_to(exact, -3.0, 3.0, extra_breaks=edges, pieces=4))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.01


def test_comb_windows_and_truncation():
    system, src = corpus.linear_inverse_sqrt()
    comb = DiracComb(system, src, 0.1, 0.04)
    # [DERIVED] support [-1, 1] with h = 0.1 gives windows j = -10 .. 9 carrying mass
    assert comb.keys == tuple(range(-10, 10))
    assert comb.total_strength == pytest.approx(2.0)
    assert comb.strength(0) == pytest.approx(math.sqrt(0.1))


def test_comb_consistency_and_budget_under_evolution():
    system, src, _ = corpus.euler_pipe(a_plus=1.1)
    u0 = PiecewiseConstant([-0.6, 0.5], [[1.1, 0.2], [1.0, 0.1], [1.05, 0.15]])
    fs0 = build_initial(system, src, u0, 0.04, 0.1)
    for t in (0.1, 0.3, 0.5):
        fs = advance(fs0, t)
        invariants(fs, fs.comb, eps=0.04)


def test_restart_matches_direct_run():
    u0 = PiecewiseConstant([-0.5, 0.0, 0.6], [[0.6], [-0.2], [0.4], [-0.5]])
    direct = solve(B, ZeroSource(1), u0, 0.05, 0.1, 1.0)
    half = advance(build_initial(B, ZeroSource(1), u0, 0.05, 0.1), 0.4)
    restarted = advance(half, 1.0)
    assert direct.to_piecewise().l1_distance(restarted.to_piecewise(), -5, 10) < 1e-12


def test_runs_are_deterministic():
    system, src = corpus.burgers_constant_source()
    u0 = corpus.scenario_bank()["burgers_source"][2]
    a = solve(system, src, u0, 0.02, 0.05, 0.6)
    b = solve(system, src, u0, 0.02, 0.05, 0.6)
    assert [(f.kind, f.x, tuple(f.ur)) for f in a.fronts] == [(f.kind, f.x, tuple(f.ur)) for f in b.fronts]


def test_scalar_total_variation_never_grows_without_source():
    u0 = PiecewiseConstant([-1.0, -0.3, 0.2, 0.9], [[0.7], [-0.6], [0.5], [-0.4], [0.1]])
    fs, snaps = solve(B, ZeroSource(1), u0, 0.02, 0.1, 2.0, record_times=[0.5, 1.0, 1.5])
    tvs = [u0.total_variation()] + [snaps[t].total_variation() for t in (0.5, 1.0, 1.5, 2.0)]
    assert all(b <= a + 1e-12 for a, b in zip(tvs, tvs[1:]))
    assert fs.stats["glimm_violations"] == 0


def test_glimm_report_at_start():
    fs = build_initial(B, ZeroSource(1), PiecewiseConstant.riemann(0.0, [0.4], [0.0]), 0.05, 0.1)
    g = glimm_report(fs)
    # [DERIVED] one shock of strength 0.4 and nothing approaching it
    assert g.V == pytest.approx(0.4) and g.Q == 0.0


def test_event_log_records_interactions():
    events = []
    u0 = PiecewiseConstant([0.0, 0.5], [[0.8], [0.4], [0.0]])
    solve(B, ZeroSource(1), u0, 0.05, 0.1, 2.0, event_log=events.append)
    assert len(events) == 1 and events[0]["solver"] == "homogeneous"
    assert events[0]["t"] == pytest.approx(1.25)


def test_tv_threshold_and_event_budget():
    u0 = PiecewiseConstant([0.0, 0.5], [[0.8], [0.4], [0.0]])
    with pytest.raises(FrontTrackingError) as exc:
        build_initial(B, ZeroSource(1), u0, 0.05, 0.1, config=TrackerConfig(0.05, 0.1, tv_threshold=0.5))
    assert exc.value.invariant == "tv_threshold"
    fs = build_initial(B, ZeroSource(1), u0, 0.05, 0.1, config=TrackerConfig(0.05, 0.1, max_events=0))
    with pytest.raises(FrontTrackingError) as exc:
        advance(fs, 2.0)
    assert exc.value.invariant == "max_events"


def test_inadmissible_initial_state():
    with pytest.raises(Exception, match="outside the admissible region"):
        build_initial(B, ZeroSource(1), PiecewiseConstant.constant([1.5]), 0.05, 0.1)


def test_cannot_advance_backwards():
    fs = build_initial(B, ZeroSource(1), PiecewiseConstant.riemann(0.0, [0.4], [0.0]), 0.05, 0.1)
    eng = FrontTracker.from_frontset(fs)
    eng.advance(0.5)
    with pytest.raises(ValueError):
        eng.advance(0.2)


vals = st.lists(st.floats(-0.6, 0.6), min_size=3, max_size=5)


@settings(max_examples=25, deadline=None)
@given(vals, st.booleans())
def test_random_scalar_runs_keep_invariants(values, with_source):
    system, src = corpus.burgers_state_source() if with_source else (B, ZeroSource(1))
    breaks = np.linspace(-0.8, 0.8, len(values) - 1)
    u0 = PiecewiseConstant(breaks, [[v] for v in values])
    fs0 = build_initial(system, src, u0, 0.05, 0.1)
    fs = advance(fs0, 0.6)
    invariants(fs, fs.comb, eps=0.05)
    assert fs.stats["tv_max"] >= fs.total_variation() - 1e-12


@settings(max_examples=15, deadline=None)
@given(st.lists(st.tuples(st.floats(0.9, 1.25), st.floats(-0.1, 0.25)), min_size=2, max_size=4))
def test_random_isentropic_runs_keep_invariants(states):
    E = isentropic_system()
    u0 = PiecewiseConstant(np.linspace(-0.5, 0.5, len(states) - 1), states)
    fs = solve(E, ZeroSource(2), u0, 0.05, 0.1, 0.4)
    invariants(fs, eps=0.05)


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_linear_transport_mass_balance(a, b):
    # [DERIVED] f = 2u with a u-independent source: d/dt int u = int g = 2, so at t = 0.5
    # the mass has grown by exactly 1; each zero-wave emits a jump of half its window mass
    system, src = corpus.linear_inverse_sqrt()
    u0 = PiecewiseConstant([-2.0, -1.5, -1.2], [[0.0], [a], [b], [0.0]])
    fs = solve(system, src, u0, 0.04, 0.1, 0.5)
    lo, hi = -10.0, 10.0
    total = fs.to_piecewise().integral(lo, hi)[0]
    expected = u0.integral(lo, hi)[0] + 0.5 * 2.0
    assert total == pytest.approx(expected, abs=1e-10)
    assert np.allclose(phi_h(system, src, 0.0, 0.1, [0.0]), [0.5 * math.sqrt(0.1)])
