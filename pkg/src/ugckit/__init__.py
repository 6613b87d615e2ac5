"""ugckit: design and analysis toolkit for compliant ring modules.

Fits Gaussian-process force and return-angle models to compliant-joint bench
data, ships built-in calibrated coefficients for two joint families, and
sizes the actuator, spindle, and per-joint bend angle needed to contract a
cable-driven ring to a target radius.
"""

from .archive import load_archive, load_model, save_model
from .data import (
    Direction,
    FamilyKind,
    JointDataset,
    JointFamily,
    MeasurementSample,
    average_runs,
    parse_measurements,
    serialize_measurements,
)
from .gpr import (
    FittedGP,
    GridSpec,
    KernelHyperParams,
    basis_expand,
    fit,
    kernel_se,
    log_marginal_likelihood,
    predict,
    tune_hyperparams,
)
from .joints import (
    ForcePrediction,
    GprFitConfig,
    JointEnvelope,
    JointFamilyModel,
    PolyModel,
    builtin_model,
    envelope_for,
    envelope_table_as_json,
    fit_family_model,
    fit_poly_baseline,
    predict_force,
    predict_return_angle,
)
from .mechanics import (
    ActuatorSpec,
    DesignReport,
    RingDesignSpec,
    SpringChain,
    design_module,
    effective_stiffness,
    motor_requirements,
    required_bend_angle,
    ring_geometry,
    section_force,
    target_arc,
)

__version__ = "0.1.0"

__all__ = [
    "ActuatorSpec",
    "Direction",
    "DesignReport",
    "FamilyKind",
    "FittedGP",
    "ForcePrediction",
    "GprFitConfig",
    "GridSpec",
    "JointDataset",
    "JointEnvelope",
    "JointFamily",
    "JointFamilyModel",
    "KernelHyperParams",
    "MeasurementSample",
    "PolyModel",
    "RingDesignSpec",
    "SpringChain",
    "average_runs",
    "basis_expand",
    "builtin_model",
    "design_module",
    "effective_stiffness",
    "envelope_for",
    "envelope_table_as_json",
    "fit",
    "fit_family_model",
    "fit_poly_baseline",
    "kernel_se",
    "load_archive",
    "load_model",
    "log_marginal_likelihood",
    "motor_requirements",
    "parse_measurements",
    "predict",
    "predict_force",
    "predict_return_angle",
    "required_bend_angle",
    "ring_geometry",
    "save_model",
    "section_force",
    "serialize_measurements",
    "target_arc",
    "tune_hyperparams",
]
