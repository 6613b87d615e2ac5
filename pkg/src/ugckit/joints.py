"""Per-family joint models: force and return-angle predictors plus envelopes.

A JointFamilyModel bundles a force predictor F(angle[, thickness]) in N, an
optional return-angle predictor (180 deg = full recovery), and the static
deformation envelope for the geometry (yield onset, self-contact, observed
force peak, where recovery starts to degrade).

Two families ship with built-in force coefficients over the pure-quadratic
basis; every other family, and all return-angle models, must be fitted from
bench data. A plain polynomial baseline is included for accuracy
comparisons against the GP fit.

Predictions for the curve family are refused outside the validated window
of 30 to 150 deg, where the regression has no supporting data; other
families only get an extrapolation warning there.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import gpr
from .data import FamilyKind, JointDataset, JointFamily
from .errors import (
    IllConditionedError,
    InsufficientDataError,
    MissingThicknessError,
    NoBuiltinModelError,
    NoReturnModelError,
    OutOfValidatedRangeError,
)

VALIDATED_ANGLE_RANGE = (30.0, 150.0)  # deg
TESTED_THICKNESS_RANGE = (0.4, 1.6)  # mm
MIN_FAMILY_SAMPLES = 5

# warning flags attached to predictions
WARN_EXTRAPOLATION = "extrapolation"
WARN_REST_FORCE = "rest_force"

DEFAULT_ANGLE_LENGTH_SCALE = 20.0  # deg
DEFAULT_THICKNESS_LENGTH_SCALE = 0.4  # mm
DEFAULT_NOISE_FRACTION = 0.01  # of target sample variance

# built-in force-model coefficients over the basis [1, angle, (T,) angle^2, (T^2)]
# and the matching noise standard deviations
BUILTIN_FORCE_BETA = {
    FamilyKind.CURVE: (-2.4933, 0.1164, 0.0, -0.0007, 8.4377),
    FamilyKind.SQUARE_SYM: (1.6940, 0.0225, -0.0002),
}
BUILTIN_NOISE_STD = {
    FamilyKind.CURVE: 1.9272,
    FamilyKind.SQUARE_SYM: 0.2916,
}


@dataclass(frozen=True)
class JointEnvelope:
    """Static deformation limits for one joint geometry (angles in deg).

    max_observed_force is None where no peak was recorded on the bench.
    """

    yield_angle: float
    self_contact_angle: float | None
    max_observed_force: float | None  # N
    return_decay_onset: float

    def __post_init__(self):
        if not 0.0 < self.return_decay_onset <= self.yield_angle <= 180.0:
            raise ValueError(
                f"need 0 < decay onset <= yield <= 180, got "
                f"{self.return_decay_onset}, {self.yield_angle}"
            )
        if self.self_contact_angle is not None and not 0.0 < self.self_contact_angle <= 180.0:
            raise ValueError(f"self_contact_angle {self.self_contact_angle} outside (0, 180]")


ENVELOPE_TABLE_VERSION = 1

# Rows keyed by (family kind, thick-wall flag); the flag only matters for the
# curve family, where walls of 0.8 mm and up behave differently from 0.4 mm.
# Values without a recorded counterpart on the bench are None.
_ENVELOPES = {
    (FamilyKind.STRAIGHT, False): JointEnvelope(
        yield_angle=135.0, self_contact_angle=None, max_observed_force=None,
        return_decay_onset=135.0,
    ),
    (FamilyKind.CURVE, False): JointEnvelope(  # 0.4 mm wall
        yield_angle=140.0, self_contact_angle=None, max_observed_force=2.9,
        return_decay_onset=90.0,
    ),
    (FamilyKind.CURVE, True): JointEnvelope(  # 0.8 mm wall and up
        yield_angle=140.0, self_contact_angle=None, max_observed_force=7.1,
        return_decay_onset=90.0,
    ),
    (FamilyKind.DOUBLE_CURVE, False): JointEnvelope(
        yield_angle=150.0, self_contact_angle=110.0, max_observed_force=15.5,
        return_decay_onset=150.0,
    ),
    (FamilyKind.SQUARE_SYM, False): JointEnvelope(
        yield_angle=90.0, self_contact_angle=150.0, max_observed_force=None,
        return_decay_onset=70.0,
    ),
    (FamilyKind.SQUARE_NONSYM, False): JointEnvelope(
        yield_angle=90.0, self_contact_angle=150.0, max_observed_force=None,
        return_decay_onset=40.0,
    ),
}


def envelope_for(family: JointFamily) -> JointEnvelope:
    """Envelope row for a concrete joint (curve rows depend on thickness)."""
    thick = family.kind is FamilyKind.CURVE and family.thickness >= 0.8
    return _ENVELOPES[(family.kind, thick)]


def envelope_table_as_json() -> dict:
    """The full envelope table as a JSON-ready document."""
    rows = []
    for (kind, thick), env in sorted(_ENVELOPES.items(), key=lambda kv: (kv[0][0].value, kv[0][1])):
        rows.append(
            {
                "family": kind.value,
                "thick_wall": thick if kind is FamilyKind.CURVE else None,
                "yield_angle_deg": env.yield_angle,
                "self_contact_angle_deg": env.self_contact_angle,
                "max_observed_force_n": env.max_observed_force,
                "return_decay_onset_deg": env.return_decay_onset,
            }
        )
    return {"version": ENVELOPE_TABLE_VERSION, "envelopes": rows}


@dataclass(frozen=True)
class JointFamilyModel:
    """Calibrated predictors for one joint family.

    force_model inputs are [angle] (deg) or [angle, thickness] (deg, mm) for
    the curve family; return_model shares the input layout and is None until
    fitted from data. LOO RMSE fields are filled by fit_family_model.
    """

    kind: FamilyKind
    force_model: gpr.FittedGP
    return_model: gpr.FittedGP | None = None
    force_loo_rmse: float | None = None
    return_loo_rmse: float | None = None

    def __post_init__(self):
        want = 2 if self.kind is FamilyKind.CURVE else 1
        if self.force_model.input_dim != want:
            raise ValueError(
                f"{self.kind.value} force model must have {want}-D inputs, "
                f"got {self.force_model.input_dim}"
            )
        if self.return_model is not None and self.return_model.input_dim != want:
            raise ValueError(f"{self.kind.value} return model must have {want}-D inputs")

    def envelope(self, thickness: float | None = None) -> JointEnvelope:
        if self.kind is FamilyKind.CURVE:
            return envelope_for(JointFamily(self.kind, thickness))
        return envelope_for(JointFamily(self.kind))


@dataclass(frozen=True)
class ForcePrediction:
    mean: float  # N
    variance: float  # N^2
    warnings: tuple[str, ...] = ()

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def _query_point(model: JointFamilyModel, theta, thickness, allow_extrapolation):
    """Validate a query and build the model input, collecting warnings."""
    warnings = []
    low, high = VALIDATED_ANGLE_RANGE
    if model.kind is FamilyKind.CURVE:
        if thickness is None:
            raise MissingThicknessError("curve-family query requires a thickness in mm")
        if not low <= theta <= high:
            if not allow_extrapolation:
                raise OutOfValidatedRangeError(theta, low, high)
            warnings.append(WARN_EXTRAPOLATION)
        tlo, thi = TESTED_THICKNESS_RANGE
        if not tlo <= thickness <= thi:
            warnings.append(WARN_EXTRAPOLATION)
        x = [theta, thickness]
    else:
        if not low <= theta <= high:
            warnings.append(WARN_EXTRAPOLATION)
        x = [theta]
    return x, warnings


def predict_force(
    model: JointFamilyModel,
    theta: float,
    thickness: float | None = None,
    allow_extrapolation: bool = False,
) -> ForcePrediction:
    """Predicted holding force at a deformation angle (deg), in newtons.

    The curve family raises OutOfValidatedRange outside 30..150 deg (pass
    allow_extrapolation=True to downgrade that to a warning); other families
    only warn. Near zero deflection the model keeps its nonzero intercept,
    which is physically a rest-force artifact, so a caveat flag is attached.
    """
    x, warnings = _query_point(model, theta, thickness, allow_extrapolation)
    mean, variance = model.force_model.predict(x)
    if theta < 1e-9 and mean > 0.0:
        warnings.append(WARN_REST_FORCE)
    return ForcePrediction(mean=mean, variance=variance, warnings=tuple(dict.fromkeys(warnings)))


def predict_return_angle(
    model: JointFamilyModel,
    theta: float,
    thickness: float | None = None,
    allow_extrapolation: bool = False,
) -> float:
    """Predicted recovery angle (deg) after release, clamped to [0, 180].

    Zero deformation returns the flat reference of 180 deg exactly.
    """
    x, _ = _query_point(model, theta, thickness, allow_extrapolation)
    if theta == 0.0:
        return 180.0
    if model.return_model is None:
        raise NoReturnModelError(f"{model.kind.value} model has no return-angle component")
    mean, _ = model.return_model.predict(x)
    return min(180.0, max(0.0, mean))


def _builtin_anchor_grid(kind: FamilyKind) -> np.ndarray:
    angles = np.array([30.0, 60.0, 90.0, 120.0, 150.0])
    if kind is FamilyKind.CURVE:
        thicknesses = np.array([0.4, 0.8, 1.2, 1.6])
        aa, tt = np.meshgrid(angles, thicknesses, indexing="ij")
        return np.column_stack([aa.ravel(), tt.ravel()])
    return angles[:, None]


def builtin_model(kind: FamilyKind) -> JointFamilyModel:
    """Force model from the built-in calibrated coefficients.

    Available for the curve and symmetric square-wave families only. The
    training anchors carry zero residuals, so the predictor is exactly the
    quadratic prior mean everywhere; there is no return-angle component.
    """
    if kind not in BUILTIN_FORCE_BETA:
        raise NoBuiltinModelError(kind.value)
    beta = np.array(BUILTIN_FORCE_BETA[kind])
    X = _builtin_anchor_grid(kind)
    y = gpr.basis_matrix(X) @ beta
    if kind is FamilyKind.CURVE:
        scales = (DEFAULT_ANGLE_LENGTH_SCALE, DEFAULT_THICKNESS_LENGTH_SCALE)
    else:
        scales = (DEFAULT_ANGLE_LENGTH_SCALE,)
    hyper = gpr.KernelHyperParams(signal_variance=float(np.var(y)), length_scales=scales)
    force = gpr.fit(X, y, hyper, noise_variance=BUILTIN_NOISE_STD[kind] ** 2, beta=beta)
    return JointFamilyModel(kind=kind, force_model=force)


@dataclass(frozen=True)
class GprFitConfig:
    """Fitting configuration; every field optional.

    grid triggers a hyperparameter search per target; otherwise hyper/noise
    are taken as given, falling back to the documented defaults (length
    scales 20 deg and 0.4 mm, signal variance = var(y), noise = 1% of
    var(y)).
    """

    hyper: gpr.KernelHyperParams | None = None
    noise_variance: float | None = None
    grid: gpr.GridSpec | None = None


def _default_hyper(kind: FamilyKind, y: np.ndarray) -> gpr.KernelHyperParams:
    if kind is FamilyKind.CURVE:
        scales = (DEFAULT_ANGLE_LENGTH_SCALE, DEFAULT_THICKNESS_LENGTH_SCALE)
    else:
        scales = (DEFAULT_ANGLE_LENGTH_SCALE,)
    return gpr.KernelHyperParams(signal_variance=float(np.var(y)), length_scales=scales)


def loo_rmse_gp(X, y, hyper, noise_variance, beta="gls") -> float:
    """Leave-one-out RMSE of the GP, refitting for every held-out point."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    errs = []
    for i in range(len(y)):
        mask = np.ones(len(y), dtype=bool)
        mask[i] = False
        m = gpr.fit(X[mask], y[mask], hyper, noise_variance, beta=beta)
        mean, _ = m.predict(X[i])
        errs.append(mean - y[i])
    return float(np.sqrt(np.mean(np.square(errs))))


def family_training_arrays(ds: JointDataset, kind: FamilyKind):
    """(X, force, return) training arrays for one family; X is (n, 1) angles
    or (n, 2) angle/thickness columns for the curve family."""
    samples = ds.samples_for(kind)
    if len(samples) < MIN_FAMILY_SAMPLES:
        raise InsufficientDataError(
            f"{kind.value}: {len(samples)} samples, need at least {MIN_FAMILY_SAMPLES}"
        )
    if kind is FamilyKind.CURVE:
        X = np.array([[s.deformation_angle, s.family.thickness] for s in samples])
    else:
        X = np.array([[s.deformation_angle] for s in samples])
    force = np.array([s.force for s in samples])
    ret = np.array([s.return_angle for s in samples])
    return X, force, ret


def _fit_target(X, y, kind: FamilyKind, config: GprFitConfig):
    if config.grid is not None:
        hyper, noise = gpr.tune_hyperparams(X, y, config.grid)
    else:
        hyper = config.hyper or _default_hyper(kind, y)
        noise = config.noise_variance
        if noise is None:
            noise = max(1e-8, DEFAULT_NOISE_FRACTION * float(np.var(y)))
    model = gpr.fit(X, y, hyper, noise)
    rmse = loo_rmse_gp(X, y, hyper, noise) if len(y) >= 2 else None
    return model, rmse


def fit_family_model(
    ds: JointDataset, kind: FamilyKind, config: GprFitConfig | None = None
) -> JointFamilyModel:
    """Fit force and return-angle models for one family from bench data.

    Needs at least 5 samples of the family. Forward and reverse runs are
    folded into the same model (the bench showed matching responses in both
    directions); direction stays available in the dataset for audits.
    """
    config = config or GprFitConfig()
    X, force, ret = family_training_arrays(ds, kind)
    force_model, force_rmse = _fit_target(X, force, kind, config)
    return_model, return_rmse = _fit_target(X, ret, kind, config)
    return JointFamilyModel(
        kind=kind,
        force_model=force_model,
        return_model=return_model,
        force_loo_rmse=force_rmse,
        return_loo_rmse=return_rmse,
    )


@dataclass(frozen=True)
class PolyModel:
    """Plain least-squares polynomial in the deformation angle.

    Coefficients live in the scaled domain [-1, 1] (power order, constant
    first); domain maps angles into it. Used as an accuracy baseline only.
    """

    degree: int
    coefficients: tuple[float, ...]
    domain: tuple[float, float]

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        if len(self.coefficients) != self.degree + 1:
            raise ValueError(
                f"degree {self.degree} needs {self.degree + 1} coefficients, "
                f"got {len(self.coefficients)}"
            )

    def predict(self, theta: float) -> float:
        lo, hi = self.domain
        t = (2.0 * theta - (lo + hi)) / (hi - lo)
        return float(np.polynomial.polynomial.polyval(t, np.asarray(self.coefficients)))


def _poly_coeffs(x: np.ndarray, y: np.ndarray, degree: int):
    """Solve the scaled-domain Vandermonde system.

    Normal equations are used while their condition estimate stays below
    1e12; beyond that the orthogonal (lstsq) path takes over, and only a
    rank-deficient orthogonal solve is an error.
    """
    lo, hi = float(np.min(x)), float(np.max(x))
    if hi <= lo:
        raise IllConditionedError("all samples share one angle; polynomial is undetermined")
    t = (2.0 * x - (lo + hi)) / (hi - lo)
    V = np.vander(t, degree + 1, increasing=True)
    M = V.T @ V
    if np.linalg.cond(M) <= 1e12:
        coeffs = np.linalg.solve(M, V.T @ y)
    else:
        coeffs, _, rank, _ = np.linalg.lstsq(V, y, rcond=None)
        if rank < degree + 1:
            raise IllConditionedError(
                f"rank {rank} < {degree + 1} even with the orthogonal solver"
            )
    return coeffs, (lo, hi)


def fit_poly_baseline(
    ds: JointDataset, kind: FamilyKind, degree: int, target: str = "force"
) -> PolyModel:
    """Degree-n polynomial baseline in angle for one family.

    Curve-family data must be at a single fixed thickness (the baseline is
    one-dimensional). target selects 'force' or 'return'.
    """
    samples = ds.samples_for(kind)
    if kind is FamilyKind.CURVE:
        thicknesses = {s.family.thickness for s in samples}
        if len(thicknesses) > 1:
            raise ValueError(
                f"polynomial baseline needs a single thickness, got {sorted(thicknesses)}"
            )
    if len(samples) < degree + 1:
        raise InsufficientDataError(
            f"{kind.value}: {len(samples)} samples cannot support degree {degree}"
        )
    x = np.array([s.deformation_angle for s in samples])
    if target == "force":
        y = np.array([s.force for s in samples])
    elif target == "return":
        y = np.array([s.return_angle for s in samples])
    else:
        raise ValueError(f"target must be 'force' or 'return', got {target!r}")
    coeffs, domain = _poly_coeffs(x, y, degree)
    return PolyModel(degree=degree, coefficients=tuple(float(c) for c in coeffs), domain=domain)


def loo_rmse_poly(x, y, degree: int) -> float:
    """Leave-one-out RMSE of the polynomial baseline."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    errs = []
    for i in range(len(y)):
        mask = np.ones(len(y), dtype=bool)
        mask[i] = False
        coeffs, (lo, hi) = _poly_coeffs(x[mask], y[mask], degree)
        t = (2.0 * x[i] - (lo + hi)) / (hi - lo)
        errs.append(float(np.polynomial.polynomial.polyval(t, coeffs)) - y[i])
    return float(np.sqrt(np.mean(np.square(errs))))
