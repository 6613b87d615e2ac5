"""Unit conversion helpers.

Angles travel through the toolkit in degrees and lengths in millimeters;
torque math switches to SI (N, m) only inside the ring-mechanics module.
Keeping the conversions in one place makes that boundary testable.
"""

import math

DEG_PER_RAD = 180.0 / math.pi


def deg_to_rad(angle_deg: float) -> float:
    return angle_deg / DEG_PER_RAD


def rad_to_deg(angle_rad: float) -> float:
    return angle_rad * DEG_PER_RAD


def mm_to_m(length_mm: float) -> float:
    return length_mm / 1000.0


def m_to_mm(length_m: float) -> float:
    return length_m * 1000.0
