import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ugckit import joints, mechanics
from ugckit.data import FamilyKind, JointFamily
from ugckit.errors import DesignSpecError, GeometryInfeasibleError, ZeroDeflectionError

ACTUATOR = mechanics.ActuatorSpec(rated_torque=0.08, spindle_radius=3.0)


def reference_ring_spec(**overrides):
    kwargs = dict(
        outer_radius=100.0,
        n_sections=5,
        joints_per_ring=40,
        target_ratio=0.85,
        actuator=ACTUATOR,
        joint=JointFamily(FamilyKind.SQUARE_SYM),
        ring_layers=2,
        per_joint_force_override=1.05,
    )
    kwargs.update(overrides)
    return mechanics.RingDesignSpec(**kwargs)


class TestRingGeometry:
    def test_reference_ring(self):
        section, half = mechanics.ring_geometry(100.0, 5)
        assert half == pytest.approx(62.83, abs=0.005)
        assert section == pytest.approx(125.66, abs=0.01)

    def test_single_section_full_circumference(self):
        section, half = mechanics.ring_geometry(100.0, 1)
        assert section == pytest.approx(628.32, abs=0.005)
        assert half == pytest.approx(314.16, abs=0.005)

    def test_half_radius(self):
        _, half = mechanics.ring_geometry(50.0, 5)
        assert half == pytest.approx(31.42, abs=0.005)

    def test_sections_tile_the_circumference(self):
        for n in (1, 2, 5, 8, 12):
            section, _ = mechanics.ring_geometry(73.0, n)
            assert n * section == pytest.approx(2 * math.pi * 73.0, rel=1e-9)


class TestTargetArc:
    def test_reference_contraction(self):
        new_arc, delta = mechanics.target_arc(62.83185307179586, 0.85)
        assert new_arc == pytest.approx(53.41, abs=0.005)
        assert delta == pytest.approx(9.42, abs=0.005)

    def test_identity_ratio(self):
        new_arc, delta = mechanics.target_arc(40.0, 1.0)
        assert new_arc == 40.0
        assert delta == 0.0

    def test_half_ratio(self):
        new_arc, _ = mechanics.target_arc(62.83185307179586, 0.5)
        assert new_arc == pytest.approx(31.42, abs=0.005)


class TestRequiredBendAngle:
    def test_reference_fold(self):
        # independent oracle: cos(angle) = adjacent/hypotenuse = 26.70/31.42
        half = 62.83185307179586
        delta = 9.424777960769379
        oracle = math.degrees(math.acos(((half - delta) / 2.0) / (half / 2.0)))
        angle = mechanics.required_bend_angle(half, delta)
        assert angle == pytest.approx(oracle, abs=1e-12)
        assert angle == pytest.approx(31.8, abs=0.1)

    def test_zero_delta_zero_angle(self):
        assert mechanics.required_bend_angle(62.83, 0.0) == 0.0

    def test_delta_at_or_past_arc_infeasible(self):
        with pytest.raises(GeometryInfeasibleError):
            mechanics.required_bend_angle(60.0, 60.0)
        with pytest.raises(GeometryInfeasibleError):
            mechanics.required_bend_angle(60.0, 75.0)

    def test_negative_delta_infeasible(self):
        with pytest.raises(GeometryInfeasibleError):
            mechanics.required_bend_angle(60.0, -5.0)

    @given(st.floats(min_value=0.001, max_value=0.998))
    def test_monotone_in_delta(self, frac):
        arc = 62.83
        a1 = mechanics.required_bend_angle(arc, frac * arc)
        a2 = mechanics.required_bend_angle(arc, (frac + 0.0005) * arc)
        assert a2 > a1


class TestSectionForce:
    def test_no_deformation_no_force(self):
        chain = mechanics.SpringChain(elements=((10.0, 0.0),), current_radius=100.0)
        assert mechanics.section_force(chain) == 0.0

    def test_single_spring_closed_form(self):
        chain = mechanics.SpringChain(elements=((10.0, 30.0),), current_radius=100.0)
        assert mechanics.section_force(chain) == pytest.approx(6.0, rel=1e-15)

    def test_split_chain_matches_single_spring(self):
        total = mechanics.section_force(
            mechanics.SpringChain(elements=((10.0, 30.0),), current_radius=100.0)
        )
        split = mechanics.section_force(
            mechanics.SpringChain(elements=((10.0, 15.0), (10.0, 30.0)), current_radius=100.0)
        )
        assert split == pytest.approx(total, rel=1e-15)

    def test_linearity_and_inverse_radius(self):
        base = mechanics.SpringChain(
            elements=((7.0, 12.0), (3.0, 20.0), (5.0, 33.0)), current_radius=80.0
        )
        f = mechanics.section_force(base)
        doubled_k = mechanics.SpringChain(
            elements=tuple((2.0 * k, a) for k, a in base.elements), current_radius=80.0
        )
        assert mechanics.section_force(doubled_k) == pytest.approx(2.0 * f, rel=1e-12)
        doubled_r = mechanics.SpringChain(elements=base.elements, current_radius=160.0)
        assert mechanics.section_force(doubled_r) == pytest.approx(0.5 * f, rel=1e-12)

    def test_radius_clamped_into_bounds(self):
        chain = mechanics.SpringChain(
            elements=((10.0, 30.0),), current_radius=500.0, min_radius=3.0, max_radius=100.0
        )
        assert chain.current_radius == 100.0

    def test_rejects_nonpositive_stiffness(self):
        with pytest.raises(ValueError):
            mechanics.SpringChain(elements=((0.0, 10.0),), current_radius=100.0)


class TestEffectiveStiffness:
    def test_closed_form(self):
        assert mechanics.effective_stiffness(6.0, 30.0, 100.0) == pytest.approx(20.0, rel=1e-15)

    def test_zero_force(self):
        assert mechanics.effective_stiffness(0.0, 30.0, 100.0) == 0.0

    def test_zero_deflection_rejected(self):
        with pytest.raises(ZeroDeflectionError):
            mechanics.effective_stiffness(6.0, 0.0, 100.0)

    def test_round_trip_against_section_force(self):
        force, delta, radius = 6.0, 30.0, 100.0
        k_total = mechanics.effective_stiffness(force, delta, radius)
        # k aggregates both mirror halves; one side of the chain carries k/2
        chain = mechanics.SpringChain(elements=((k_total / 2.0, delta),), current_radius=radius)
        assert mechanics.section_force(chain) == pytest.approx(force, abs=1e-12)


class TestMotorRequirements:
    def test_reference_numbers(self):
        req = mechanics.motor_requirements(40, 1.05, ACTUATOR)
        assert req.total_force == 42.0
        assert req.min_spindle_radius == pytest.approx(1.905, abs=1e-3)
        assert req.torque_at_spindle == pytest.approx(0.126, abs=1e-12)
        assert req.overdrive  # 0.126 N*m > 0.08 N*m rating

    def test_no_load(self):
        req = mechanics.motor_requirements(1, 0.0, ACTUATOR)
        assert req.total_force == 0.0
        assert req.no_load
        assert math.isinf(req.min_spindle_radius)
        assert not req.overdrive

    def test_torque_radius_unit_round_trip_exact(self):
        req = mechanics.motor_requirements(40, 1.05, ACTUATOR)
        assert req.min_spindle_radius / 1000.0 * req.total_force == pytest.approx(
            0.08, rel=1e-12
        )

    def test_overdrive_respects_tolerance(self):
        tolerant = mechanics.ActuatorSpec(0.08, 3.0, overdrive_factor=2.0)
        req = mechanics.motor_requirements(40, 1.05, tolerant)
        assert not req.overdrive  # 0.126 <= 0.08 * 2


class TestRecommendedSpindle:
    def test_reference_recommendation(self):
        assert mechanics.recommended_spindle_radius(1.9047619047619047, 1.5) == pytest.approx(
            3.0, abs=1e-12
        )

    def test_exact_grid_value_stays(self):
        assert mechanics.recommended_spindle_radius(2.0, 1.5) == pytest.approx(3.0, abs=1e-12)

    def test_unbounded_stays_unbounded(self):
        assert math.isinf(mechanics.recommended_spindle_radius(math.inf, 1.5))


class TestDesignModule:
    def test_reference_design(self):
        report = mechanics.design_module(
            reference_ring_spec(), joints.builtin_model(FamilyKind.SQUARE_SYM)
        )
        assert report.half_section_arc == pytest.approx(62.83, abs=0.05)
        assert report.target_half_arc == pytest.approx(53.41, abs=0.05)
        assert report.bend_angle == pytest.approx(31.79, abs=0.1)
        assert report.total_force == 42.0
        assert report.min_spindle_radius == pytest.approx(1.905, abs=1e-3)
        assert report.recommended_spindle_radius >= 3.0
        assert report.per_joint_force_source == "override"
        # the model's own prediction is surfaced alongside the override
        assert report.model_force == pytest.approx(2.2073, abs=1e-3)
        assert any("override" in d for d in report.diagnostics)
        assert mechanics.FLAG_OVERDRIVE in report.flags  # 0.126 N*m at r=3 mm

    def test_identity_design_zero_everything(self):
        report = mechanics.design_module(
            reference_ring_spec(target_ratio=1.0), joints.builtin_model(FamilyKind.SQUARE_SYM)
        )
        assert report.bend_angle == 0.0
        assert report.total_force == 0.0
        assert report.per_joint_force == 0.0
        assert report.flags == ()
        assert report.predicted_return_angle == 180.0

    def test_deep_contraction_infeasible(self):
        with pytest.raises(GeometryInfeasibleError):
            mechanics.design_module(
                reference_ring_spec(target_ratio=0.1), joints.builtin_model(FamilyKind.SQUARE_SYM)
            )

    def test_model_supplies_force_without_override(self):
        report = mechanics.design_module(
            reference_ring_spec(per_joint_force_override=None),
            joints.builtin_model(FamilyKind.SQUARE_SYM),
        )
        assert report.per_joint_force_source == "model"
        assert report.per_joint_force == pytest.approx(2.2073, abs=1e-3)
        assert report.total_force == pytest.approx(40 * report.per_joint_force, rel=1e-15)

    def test_report_self_consistent(self):
        from ugckit import units

        report = mechanics.design_module(
            reference_ring_spec(), joints.builtin_model(FamilyKind.SQUARE_SYM)
        )
        section, half = mechanics.ring_geometry(report.outer_radius, report.n_sections)
        assert report.section_arc == section
        assert report.half_section_arc == half
        new_half, delta = mechanics.target_arc(half, report.target_ratio)
        assert report.target_half_arc == new_half
        assert report.arc_delta == delta
        assert report.bend_angle == mechanics.required_bend_angle(half, delta)
        assert report.total_force == report.total_joints * report.per_joint_force
        assert report.torque_at_spindle == report.total_force * units.mm_to_m(
            report.spindle_radius
        )
        assert report.min_spindle_radius == units.m_to_mm(
            report.rated_torque / report.total_force
        )
        assert report.recommended_spindle_radius == mechanics.recommended_spindle_radius(
            report.min_spindle_radius, report.safety_factor
        )

    def test_family_mismatch_rejected(self):
        with pytest.raises(ValueError):
            mechanics.design_module(
                reference_ring_spec(joint=JointFamily(FamilyKind.CURVE, 0.4)),
                joints.builtin_model(FamilyKind.SQUARE_SYM),
            )

    def test_json_units_attached(self):
        report = mechanics.design_module(
            reference_ring_spec(), joints.builtin_model(FamilyKind.SQUARE_SYM)
        )
        doc = report.to_json_dict()
        assert doc["quantities"]["half_section_arc"]["unit"] == "mm"
        assert doc["quantities"]["bend_angle"]["unit"] == "deg"
        assert doc["quantities"]["torque_at_spindle"]["unit"] == "N*m"
        assert doc["quantities"]["total_force"]["value"] == 42.0
        summary = report.format_summary()
        assert "total cable force" in summary
        assert "42" in summary


class TestSpecJson:
    def good_doc(self):
        return {
            "outer_radius_mm": 100.0,
            "n_sections": 5,
            "joints_per_ring": 40,
            "ring_layers": 2,
            "target_ratio": 0.85,
            "actuator": {
                "rated_torque_nm": 0.08,
                "spindle_radius_mm": 3.0,
                "overdrive_factor": 1.0,
            },
            "joint": {"family": "square_sym", "thickness_mm": None},
            "per_joint_force_n": 1.05,
        }

    def test_round_trip(self):
        spec = mechanics.spec_from_json_dict(self.good_doc())
        doc = mechanics.spec_to_json_dict(spec)
        assert mechanics.spec_from_json_dict(doc) == spec

    def test_problems_are_collected(self):
        doc = self.good_doc()
        del doc["outer_radius_mm"]
        doc["target_ratio"] = 1.5
        doc["bogus"] = 1
        with pytest.raises(DesignSpecError) as err:
            mechanics.spec_from_json_dict(doc)
        text = " ".join(err.value.problems)
        assert "outer_radius_mm" in text
        assert "target_ratio" in text
        assert "bogus" in text

    def test_divisibility_checked(self):
        doc = self.good_doc()
        doc["joints_per_ring"] = 41
        with pytest.raises(DesignSpecError):
            mechanics.spec_from_json_dict(doc)

    def test_curve_joint_needs_thickness(self):
        doc = self.good_doc()
        doc["joint"] = {"family": "curve", "thickness_mm": None}
        with pytest.raises(DesignSpecError):
            mechanics.spec_from_json_dict(doc)
