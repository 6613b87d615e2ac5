"""Command-line front end.

Subcommands: fit, predict, design, builtin, validate. Exit codes are 0 for
success, 1 for computation failures (fit breakdown, infeasible geometry),
and 2 for input or validation problems. Global flags --config/--quiet/--json
work on every subcommand; the UGC_CONFIG environment variable names a
fallback config file. Config files are flat key = value documents; flags
beat file values, file values beat defaults.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import archive, gpr, joints, mechanics
from .data import FamilyKind, average_runs, parse_measurements
from .errors import ComputationError, DesignSpecError, InputError, UgcError

CONFIG_ENV_VAR = "UGC_CONFIG"

_CONFIG_KEYS = {
    "quiet": bool,
    "json": bool,
    "allow_extrapolation": bool,
    "angle_bin": float,
    "safety_factor": float,
    "degree": int,
    "noise_variance": float,
}

_BOOL_TOKENS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key = value")
        key, _, val = (p.strip() for p in line.partition("="))
        val = val.strip("\"'")
        if key not in _CONFIG_KEYS:
            raise InputError(f"{path}:{lineno}: unknown config key {key!r}")
        kind = _CONFIG_KEYS[key]
        if kind is bool:
            if val.lower() not in _BOOL_TOKENS:
                raise InputError(f"{path}:{lineno}: {key} must be true/false")
            values[key] = _BOOL_TOKENS[val.lower()]
        else:
            try:
                values[key] = kind(val)
            except ValueError:
                raise InputError(f"{path}:{lineno}: {key} must be a {kind.__name__}") from None
    return values


class _Settings:
    """Resolved option lookup: flag > config file > default."""

    def __init__(self, args):
        self.args = args
        self.config = {}
        path = args.config or os.environ.get(CONFIG_ENV_VAR)
        if path:
            self.config = _load_config(path)

    def get(self, key, default):
        flag = getattr(self.args, key, None)
        if flag is not None:
            return flag
        return self.config.get(key, default)


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _family_kind(token: str) -> FamilyKind:
    try:
        return FamilyKind(token)
    except ValueError:
        choices = ", ".join(k.value for k in FamilyKind)
        raise InputError(f"unknown family {token!r} (choices: {choices})") from None


def _family_model_from_archives(model_path, return_path=None) -> joints.JointFamilyModel:
    force, info = archive.load_archive(model_path)
    if info.family is None:
        raise InputError(f"archive {model_path} carries no family tag")
    kind = _family_kind(info.family)
    return_model = None
    if return_path is not None:
        return_model, rinfo = archive.load_archive(return_path)
        if rinfo.family is not None and rinfo.family != info.family:
            raise InputError(
                f"return-model family {rinfo.family!r} does not match {info.family!r}"
            )
    return joints.JointFamilyModel(kind=kind, force_model=force, return_model=return_model)


def _emit(settings, text):
    if not settings.get("quiet", False):
        print(text)


# -- subcommands -----------------------------------------------------------------


def _default_tuning_grid(y: np.ndarray, dim: int) -> gpr.GridSpec:
    v = max(float(np.var(y)), 1e-8)
    angle_grid = (5.0, 10.0, 20.0, 40.0)
    grids = (angle_grid,) if dim == 1 else (angle_grid, (0.2, 0.4, 0.8))
    return gpr.GridSpec(
        signal_variances=(0.5 * v, v, 2.0 * v),
        length_scale_grids=grids,
        noise_variances=(1e-3, 3e-3, 1e-2, 3e-2, 1e-1),
    )


def cmd_fit(args, settings) -> int:
    kind = _family_kind(args.family)
    ds = parse_measurements(_read_text(args.data), source=str(args.data))
    if not args.no_average:
        ds = average_runs(ds, settings.get("angle_bin", 5.0))

    config = joints.GprFitConfig(noise_variance=settings.get("noise_variance", None))
    if args.tune:
        X, force, _ = joints.family_training_arrays(ds, kind)
        config = joints.GprFitConfig(grid=_default_tuning_grid(force, X.shape[1]))
    model = joints.fit_family_model(ds, kind, config)

    degree = int(settings.get("degree", 7))
    fam_samples = ds.samples_for(kind)
    angles = np.array([s.deformation_angle for s in fam_samples])
    forces = np.array([s.force for s in fam_samples])
    try:
        poly_rmse = joints.loo_rmse_poly(angles, forces, degree)
    except (UgcError, np.linalg.LinAlgError):
        poly_rmse = None

    archive.save_model(
        model.force_model, args.out, family=kind.value, model_id=f"{kind.value}:force"
    )
    written = [str(args.out)]
    if args.return_out:
        archive.save_model(
            model.return_model, args.return_out,
            family=kind.value, model_id=f"{kind.value}:return",
        )
        written.append(str(args.return_out))

    poly_txt = f"{poly_rmse:.6g}" if poly_rmse is not None else "n/a"
    _emit(settings, f"fitted {kind.value} on {len(fam_samples)} samples")
    _emit(settings, "model        loo rmse (force, N)")
    _emit(settings, f"gpr          {model.force_loo_rmse:.6g}")
    _emit(settings, f"poly{degree}        {poly_txt}")
    _emit(settings, "wrote " + ", ".join(written))
    if settings.get("json", False):
        print(
            json.dumps(
                {
                    "family": kind.value,
                    "samples": len(fam_samples),
                    "gpr_loo_rmse_n": model.force_loo_rmse,
                    f"poly{degree}_loo_rmse_n": poly_rmse,
                    "outputs": written,
                },
                sort_keys=True,
            )
        )
    return 0


def _parse_sweep(spec_text: str):
    parts = spec_text.split(":")
    if len(parts) != 3:
        raise InputError(f"--sweep expects start:stop:step, got {spec_text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise InputError(f"--sweep values must be numbers, got {spec_text!r}") from None
    if step <= 0 or stop < start:
        raise InputError("--sweep needs step > 0 and stop >= start")
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-9:
            break
        values.append(v)
        k += 1
    return values


def cmd_predict(args, settings) -> int:
    model = _family_model_from_archives(args.model, args.return_model)
    allow = bool(settings.get("allow_extrapolation", False))
    thickness = args.thickness

    def one(theta):
        pred = joints.predict_force(model, theta, thickness, allow_extrapolation=allow)
        ret = None
        if model.return_model is not None or theta == 0.0:
            ret = joints.predict_return_angle(model, theta, thickness, allow_extrapolation=allow)
        return pred, ret

    if args.sweep:
        print("theta_deg,force_n,force_std_n,return_angle_deg")
        for theta in _parse_sweep(args.sweep):
            pred, ret = one(theta)
            ret_txt = repr(ret) if ret is not None else ""
            print(f"{theta!r},{pred.mean!r},{pred.std!r},{ret_txt}")
        return 0

    if args.theta is None:
        raise InputError("predict needs --theta or --sweep")
    pred, ret = one(args.theta)
    if settings.get("json", False):
        print(
            json.dumps(
                {
                    "theta_deg": args.theta,
                    "thickness_mm": thickness,
                    "force_n": pred.mean,
                    "force_std_n": pred.std,
                    "return_angle_deg": ret,
                    "warnings": list(pred.warnings),
                },
                sort_keys=True,
            )
        )
        return 0
    _emit(settings, f"force: {pred.mean:.6g} +/- {pred.std:.6g} N")
    _emit(settings, f"return angle: {ret:.6g} deg" if ret is not None else "return angle: n/a")
    for w in pred.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_design(args, settings) -> int:
    try:
        doc = json.loads(_read_text(args.spec))
    except json.JSONDecodeError as exc:
        raise DesignSpecError([f"not valid JSON: {exc}"]) from exc
    spec = mechanics.spec_from_json_dict(doc)
    model = _family_model_from_archives(args.model, args.return_model)
    report = mechanics.design_module(
        spec, model, safety_factor=float(settings.get("safety_factor", 1.5))
    )

    out_doc = {"design_spec": mechanics.spec_to_json_dict(spec), **report.to_json_dict()}
    text = json.dumps(out_doc, indent=2, sort_keys=True) + "\n"
    try:
        Path(args.out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write report {args.out}: {exc}") from exc

    if settings.get("json", False):
        print(text, end="")
    else:
        _emit(settings, report.format_summary())
        _emit(settings, f"wrote {args.out}")
    return 0


def cmd_builtin(args, settings) -> int:
    kind = _family_kind(args.family)
    model = joints.builtin_model(kind)
    archive.save_model(
        model.force_model, args.out, family=kind.value, model_id=f"{kind.value}:force"
    )
    _emit(settings, f"wrote built-in {kind.value} force model to {args.out}")
    return 0


def cmd_validate(args, settings) -> int:
    if not args.data and not args.spec:
        raise InputError("validate needs --data and/or --spec")
    if args.data:
        ds = parse_measurements(_read_text(args.data), source=str(args.data))
        _emit(settings, f"{args.data}: ok ({len(ds)} samples)")
    if args.spec:
        try:
            doc = json.loads(_read_text(args.spec))
        except json.JSONDecodeError as exc:
            raise DesignSpecError([f"not valid JSON: {exc}"]) from exc
        mechanics.spec_from_json_dict(doc)
        _emit(settings, f"{args.spec}: ok")
    return 0


# -- argument parsing --------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file (fallback: $UGC_CONFIG)")
    common.add_argument(
        "--quiet", action="store_true", default=None, help="suppress informational output"
    )
    common.add_argument(
        "--json", action="store_true", default=None, help="machine-readable output"
    )

    parser = argparse.ArgumentParser(
        prog="ugc",
        description="Design and analysis toolkit for compliant ring modules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common], help="fit force/return models from bench CSV")
    p.add_argument("--data", required=True, help="measurement CSV path")
    p.add_argument("--family", required=True, help="joint family token")
    p.add_argument("--out", required=True, help="force-model archive to write")
    p.add_argument("--return-out", help="also write the return-angle archive here")
    p.add_argument("--angle-bin", type=float, default=None, help="run-averaging bin (deg)")
    p.add_argument("--no-average", action="store_true", help="fit raw runs without averaging")
    p.add_argument("--noise-variance", type=float, default=None, help="fixed noise variance")
    p.add_argument("--tune", action="store_true", help="grid-search hyperparameters")
    p.add_argument("--degree", type=int, default=None, help="baseline polynomial degree")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("predict", parents=[common], help="query a fitted model archive")
    p.add_argument("--model", required=True, help="force-model archive")
    p.add_argument("--return-model", help="return-angle archive")
    p.add_argument("--theta", type=float, help="deformation angle (deg)")
    p.add_argument("--thickness", type=float, help="curve wall thickness (mm)")
    p.add_argument("--sweep", help="emit CSV predictions over start:stop:step (deg)")
    p.add_argument(
        "--allow-extrapolation", action="store_true", default=None,
        help="downgrade range errors to warnings",
    )
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("design", parents=[common], help="size a ring module")
    p.add_argument("--spec", required=True, help="design-spec JSON path")
    p.add_argument("--model", required=True, help="force-model archive")
    p.add_argument("--return-model", help="return-angle archive")
    p.add_argument("--out", required=True, help="design-report JSON to write")
    p.add_argument("--safety-factor", type=float, default=None, help="spindle safety factor")
    p.set_defaults(handler=cmd_design)

    p = sub.add_parser("builtin", parents=[common], help="write a built-in model archive")
    p.add_argument("--family", required=True, help="curve or square_sym")
    p.add_argument("--out", required=True, help="archive path to write")
    p.set_defaults(handler=cmd_builtin)

    p = sub.add_parser("validate", parents=[common], help="dry-run CSV/spec checks")
    p.add_argument("--data", help="measurement CSV to check")
    p.add_argument("--spec", help="design-spec JSON to check")
    p.set_defaults(handler=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        settings = _Settings(args)
        return args.handler(args, settings)
    except DesignSpecError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
