"""Sizing a contracting ring module end to end.

A 200 mm ring of five mirrored sections, two layers, 40 square-wave joints
total, driven by one 0.08 N*m motor winding cables on a central spindle.
The study sizes the reference design (contract to 85% radius), then sweeps
the target ratio to find the feasibility limit of the fold geometry.

Run from the repository root:  python demos/03_ring_design_study.py
"""

from ugckit import (
    ActuatorSpec,
    FamilyKind,
    JointFamily,
    RingDesignSpec,
    builtin_model,
    design_module,
)
from ugckit.errors import GeometryInfeasibleError

model = builtin_model(FamilyKind.SQUARE_SYM)

# 1. the reference design ------------------------------------------------------
# per-joint force pinned to the bench-measured 1.05 N; the report also
# surfaces what the force model itself predicts at the computed bend angle
spec = RingDesignSpec(
    outer_radius=100.0,
    n_sections=5,
    joints_per_ring=40,
    target_ratio=0.85,
    actuator=ActuatorSpec(rated_torque=0.08, spindle_radius=3.0),
    joint=JointFamily(FamilyKind.SQUARE_SYM),
    ring_layers=2,
    per_joint_force_override=1.05,
)
report = design_module(spec, model)
print(report.format_summary())

# 2. how deep can this geometry contract? ---------------------------------------
print("\ntarget ratio sweep (model-predicted joint forces):")
print("ratio  bend (deg)  total force (N)  feasible")
for pct in range(95, 9, -5):
    ratio = pct / 100.0
    candidate = RingDesignSpec(
        outer_radius=100.0,
        n_sections=5,
        joints_per_ring=40,
        target_ratio=ratio,
        actuator=ActuatorSpec(rated_torque=0.08, spindle_radius=3.0),
        joint=JointFamily(FamilyKind.SQUARE_SYM),
        ring_layers=2,
    )
    try:
        r = design_module(candidate, model)
        flags = ",".join(r.flags) if r.flags else "yes"
        print(f"{ratio:5.2f}  {r.bend_angle:9.1f}  {r.total_force:14.1f}  {flags}")
    except GeometryInfeasibleError:
        print(f"{ratio:5.2f}  {'-':>9}  {'-':>14}  fold hits the module center")
