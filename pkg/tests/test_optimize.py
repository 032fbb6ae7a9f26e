import math

import pytest
from hypothesis import given, settings, strategies as st

from ising_qfi.errors import ScanRangeError
from ising_qfi.optimize import golden_section_max, maximize, slope_sign_bisection


@given(c=st.floats(0.1, 2.9))
@settings(max_examples=50)
def test_smooth_peak(c):
    peak = maximize(lambda x: -((x - c) ** 2), 0.0, 3.0)
    assert abs(peak.x - c) < 1e-7


@given(c=st.floats(0.1, 2.9), a=st.floats(0.5, 3), b=st.floats(0.5, 3))
@settings(max_examples=50)
def test_asymmetric_cusp(c, a, b):
    f = lambda x: -a * (c - x) if x < c else -b * (x - c)
    assert abs(maximize(f, 0.0, 3.0).x - c) < 1e-7


def test_golden_section_on_interval():
    x, v = golden_section_max(math.sin, 1.0, 2.0, 1e-10)
    assert x == pytest.approx(math.pi / 2, abs=1e-7) and v == pytest.approx(1.0)


def test_slope_sign_bisection():
    x, _ = slope_sign_bisection(lambda t: -abs(t - 0.3), 0.0, 1.0, 1e-10)
    assert x == pytest.approx(0.3, abs=1e-8)


def test_upper_edge_raises():
    with pytest.raises(ScanRangeError):
        maximize(lambda x: x, 0.0, 1.0)


def test_lower_edge():
    assert maximize(lambda x: -x, 0.0, 1.0).x == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(ScanRangeError):
        maximize(lambda x: -x, 0.0, 1.0, allow_lower_edge=False)


def test_non_finite_objective():
    with pytest.raises(ScanRangeError):
        maximize(lambda x: math.nan, 0.0, 1.0, n_grid=10)
