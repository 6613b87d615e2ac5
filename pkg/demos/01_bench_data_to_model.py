"""From bench CSV to a reusable force model.

Walks the full data path: parse the measurement CSV, average repeat runs,
fit the GP force and return-angle models for the symmetric square-wave
family, compare against a degree-7 polynomial baseline, and archive the
result as versioned JSON.

Run from the repository root:  python demos/01_bench_data_to_model.py
"""

from pathlib import Path

import numpy as np

from ugckit import (
    FamilyKind,
    average_runs,
    fit_family_model,
    parse_measurements,
    predict_force,
    predict_return_angle,
    save_model,
)
from ugckit.joints import loo_rmse_poly

DATA = Path(__file__).parent / "data" / "square_sym_bench.csv"
OUT = Path(__file__).parent / "data" / "square_sym_force.json"

# 1. ingest and inspect ------------------------------------------------------
raw = parse_measurements(DATA.read_text(), source=str(DATA))
print(f"loaded {len(raw)} raw samples from {DATA.name}")

# the bench records 3 runs per angle; collapse them into per-angle means
ds = average_runs(raw, angle_bin=5.0)
print(f"averaged down to {len(ds)} samples ({ds.provenance.note})")

# 2. fit the family model -----------------------------------------------------
model = fit_family_model(ds, FamilyKind.SQUARE_SYM)
print(f"\nGP leave-one-out RMSE:   force {model.force_loo_rmse:.4f} N, "
      f"return {model.return_loo_rmse:.3f} deg")

angles = np.array([s.deformation_angle for s in ds.samples])
forces = np.array([s.force for s in ds.samples])
poly_rmse = loo_rmse_poly(angles, forces, degree=7)
print(f"degree-7 poly LOO RMSE:  force {poly_rmse:.4f} N")

# 3. query it -----------------------------------------------------------------
print("\nangle   force (N)        return angle (deg)")
for theta in (30.0, 60.0, 90.0, 120.0, 150.0):
    pred = predict_force(model, theta)
    ret = predict_return_angle(model, theta)
    print(f"{theta:5.0f}   {pred.mean:5.2f} +/- {pred.std:4.2f}   {ret:6.1f}")

# 4. archive for later use (the CLI and design studies load this file) --------
save_model(model.force_model, OUT, family="square_sym", model_id="square_sym:force")
print(f"\narchived force model -> {OUT.name}")
