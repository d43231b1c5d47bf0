import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fronttrack.piecewise import FunctionData, PiecewiseConstant, gauss_legendre, polynomial_data
from fronttrack.tracking import sample_initial


def test_right_continuity_and_left_limit():
    u = PiecewiseConstant([0.0, 1.0], [[1.0], [2.0], [3.0]])
    assert u(0.0)[0] == 2.0 and u.left_limit(0.0)[0] == 1.0
    assert u(-5.0)[0] == 1.0 and u(5.0)[0] == 3.0


def test_exact_l1_distance():
    # [DERIVED] |u - v| is 1 on [0, 0.5), 0 on [0.5, 1), 1 on [1, 2) and 2 on [2, 3)
    u = PiecewiseConstant([0.0, 1.0], [[0.0], [1.0], [2.0]])
    v = PiecewiseConstant([0.5, 2.0], [[0.0], [1.0], [0.0]])
    assert u.l1_distance(v, -1.0, 3.0) == pytest.approx(0.5 + 1.0 + 2.0)
    assert u.l1_distance(v, -1.0, 2.0) == pytest.approx(0.5 + 1.0)


def test_total_variation_window():
    # [DERIVED] jumps of size 1, 1, 5 at 0, 1, 2 (Euclidean in R^2 for the last: |(3, 4)| = 5)
    u = PiecewiseConstant([0.0, 1.0, 2.0], [[0, 0], [1, 0], [1, 1], [4, 5]])
    assert u.total_variation() == pytest.approx(7.0)
    assert u.total_variation(0.5, 3.0) == pytest.approx(6.0)


def test_distance_to_smooth_function():
    # [DERIVED] int_0^1 |x - 0| dx = 1/2; Gauss-Legendre with 8 nodes is exact for a line
    u = PiecewiseConstant.constant([0.0])
    assert u.l1_distance_to(lambda x: np.asarray(x)[:, None], 0.0, 1.0) == pytest.approx(0.5, abs=1e-15)


def test_gauss_legendre_polynomial_exactness():
    # [DERIVED] int_0^2 x^15 = 2^16 / 16 = 4096
    assert gauss_legendre(lambda x: x ** 15, 0.0, 2.0) == pytest.approx(4096.0, rel=1e-13)


def test_polynomial_data_values():
    # pieces: constant 1 left of 0, 1 + x on [0, 1), constant 2 right of 1
    d = polynomial_data([0.0, 1.0], [[[1.0]], [[1.0, 1.0]], [[2.0]]])
    assert d(np.array([-1.0, 0.5, 3.0]))[:, 0] == pytest.approx([1.0, 1.5, 2.0])
    assert d.declared_breaks == (0.0, 1.0)


def test_sampling_keeps_exact_data():
    u = PiecewiseConstant([0.0, 1.0], [[0.0], [1.0], [0.5]])
    approx, keys = sample_initial(u, 0.01)
    assert approx.l1_distance(u, -5, 5) == 0.0 and keys == {}


def test_invalid_construction():
    with pytest.raises(ValueError):
        PiecewiseConstant([0.0], [[1.0]])
    with pytest.raises(ValueError):
        PiecewiseConstant([1.0, 0.0], [[1.0], [2.0], [3.0]])


@settings(max_examples=40, deadline=None)
@given(st.floats(0.005, 0.1), st.floats(0.2, 2.0), st.floats(-1.0, 1.0))
def test_sampling_error_is_at_most_eps(eps, freq, shift):
    # smooth data are cell averaged on dx = eps / TV, so the L1 error is at most eps
    d = FunctionData(lambda x: np.sin(freq * np.pi * (x - shift))[:, None], -1.0, 1.0)
    approx, _ = sample_initial(d, eps)
    err = approx.l1_distance_to(d, -2.0, 2.0, pieces=4)
    assert err <= eps * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=6), st.data())
def test_l1_triangle_and_symmetry(breaks, data):
    breaks = sorted(breaks)
    vals = lambda: [[data.draw(st.floats(-1, 1))] for _ in range(len(breaks) + 1)]
    u, v, w = (PiecewiseConstant(breaks, vals()) for _ in range(3))
    d = lambda a, b: a.l1_distance(b, -3.0, 3.0)
    assert d(u, v) == pytest.approx(d(v, u))
    assert d(u, w) <= d(u, v) + d(v, w) + 1e-12
