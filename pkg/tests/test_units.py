import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ugckit import units


def test_deg_rad_known_values():
    assert units.deg_to_rad(180.0) == pytest.approx(math.pi, rel=1e-12)
    assert units.rad_to_deg(math.pi / 2) == pytest.approx(90.0, rel=1e-12)


def test_mm_m_known_values():
    assert units.mm_to_m(1905.0) == pytest.approx(1.905, rel=1e-12)
    assert units.m_to_mm(0.003) == pytest.approx(3.0, rel=1e-12)


@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_angle_round_trip(angle):
    back = units.rad_to_deg(units.deg_to_rad(angle))
    assert math.isclose(back, angle, rel_tol=1e-12, abs_tol=1e-12)


@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_length_round_trip(length):
    back = units.m_to_mm(units.mm_to_m(length))
    assert math.isclose(back, length, rel_tol=1e-12, abs_tol=1e-12)
