import json

import numpy as np
import pytest

from ugckit import archive, gpr
from ugckit.errors import CorruptArchiveError, IoFailureError, VersionMismatchError


@pytest.fixture
def fitted_model():
    rng = np.random.default_rng(13)
    X = np.linspace(10, 170, 12)[:, None]
    y = 1.7 + 0.02 * X[:, 0] + rng.normal(0, 0.05, 12)
    hyper = gpr.KernelHyperParams(float(np.var(y)), (20.0,))
    return gpr.fit(X, y, hyper, noise_variance=0.0025)


def test_round_trip_predictions_identical(tmp_path, fitted_model):
    path = tmp_path / "model.json"
    archive.save_model(fitted_model, path, family="square_sym", model_id="square_sym:force")
    loaded, info = archive.load_archive(path)
    assert info.family == "square_sym"
    assert info.model_id == "square_sym:force"
    rng = np.random.default_rng(99)
    for theta in rng.uniform(0, 180, 10):
        before = fitted_model.predict([theta])
        after = loaded.predict([theta])
        assert before == after  # bit-identical, not merely close


def test_round_trip_preserves_gls_beta(tmp_path, fitted_model):
    path = tmp_path / "model.json"
    archive.save_model(fitted_model, path)
    loaded = archive.load_model(path)
    assert loaded.beta.tolist() == fitted_model.beta.tolist()
    assert loaded.noise_variance == fitted_model.noise_variance
    assert loaded.hyper == fitted_model.hyper


def test_document_schema_fields(fitted_model):
    doc = archive.archive_document(fitted_model, family="square_sym")
    assert doc["version"] == archive.FORMAT_VERSION
    assert set(doc) == {
        "version", "model_id", "family", "beta", "noise_variance",
        "kernel", "train_x", "train_y",
    }
    assert set(doc["kernel"]) == {"signal_variance", "length_scales"}


def test_version_mismatch(tmp_path, fitted_model):
    path = tmp_path / "model.json"
    archive.save_model(fitted_model, path)
    doc = json.loads(path.read_text())
    doc["version"] = "0"
    path.write_text(json.dumps(doc))
    with pytest.raises(VersionMismatchError):
        archive.load_model(path)


def test_truncated_file_is_corrupt(tmp_path, fitted_model):
    path = tmp_path / "model.json"
    archive.save_model(fitted_model, path)
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(CorruptArchiveError):
        archive.load_model(path)


def test_missing_field_is_corrupt(tmp_path, fitted_model):
    path = tmp_path / "model.json"
    archive.save_model(fitted_model, path)
    doc = json.loads(path.read_text())
    del doc["train_y"]
    path.write_text(json.dumps(doc))
    with pytest.raises(CorruptArchiveError):
        archive.load_model(path)


def test_missing_file_is_io_failure(tmp_path):
    with pytest.raises(IoFailureError):
        archive.load_model(tmp_path / "nope.json")
