"""Shared fixtures: synthetic bench datasets and naive dense-inverse oracles.

The oracles intentionally use explicit loops, math.exp, and numpy.linalg.inv
so they share no code path with the library's Cholesky implementation.
"""

import math

import numpy as np
import pytest

from ugckit.data import JointDataset, parse_measurements


@pytest.fixture(autouse=True)
def _isolate_config_env(monkeypatch):
    # a user-level UGC_CONFIG must never leak into the tests
    monkeypatch.delenv("UGC_CONFIG", raising=False)

# -- independent GP oracle ----------------------------------------------------


def oracle_kernel(a, b, sf2, ls):
    s = 0.0
    for j in range(len(a)):
        s += ((a[j] - b[j]) / ls[j]) ** 2
    return sf2 * math.exp(-0.5 * s)


def oracle_basis(x):
    return np.array([1.0, *x, *(v * v for v in x)])


def oracle_gp(X, y, sf2, ls, noise, beta=None):
    """Dense-inverse fit; returns (beta, predict) where predict(q) -> (mean, var)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 1 and len(np.asarray(y).ravel()) > 1:
        X = X.T
    y = np.asarray(y, dtype=float).ravel()
    n = X.shape[0]
    K = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            K[i, j] = oracle_kernel(X[i], X[j], sf2, ls)
    A = K + noise * np.eye(n)
    Ainv = np.linalg.inv(A)
    H = np.array([oracle_basis(row) for row in X])
    if beta is None:
        beta = np.linalg.solve(H.T @ Ainv @ H, H.T @ Ainv @ y)
    else:
        beta = np.asarray(beta, dtype=float)
    alpha = Ainv @ (y - H @ beta)

    def predict(q):
        q = np.atleast_1d(np.asarray(q, dtype=float))
        k = np.array([oracle_kernel(q, row, sf2, ls) for row in X])
        mean = float(oracle_basis(q) @ beta + k @ alpha)
        var = float(oracle_kernel(q, q, sf2, ls) - k @ Ainv @ k)
        return mean, var

    return beta, predict


def oracle_lml(X, y, sf2, ls, noise, beta):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 1 and len(np.asarray(y).ravel()) > 1:
        X = X.T
    y = np.asarray(y, dtype=float).ravel()
    n = X.shape[0]
    K = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            K[i, j] = oracle_kernel(X[i], X[j], sf2, ls)
    A = K + noise * np.eye(n)
    H = np.array([oracle_basis(row) for row in X])
    r = y - H @ np.asarray(beta, dtype=float)
    sign, logdet = np.linalg.slogdet(A)
    assert sign > 0
    return float(-0.5 * r @ np.linalg.inv(A) @ r - 0.5 * logdet - 0.5 * n * math.log(2 * math.pi))


def random_gp_instance(rng, n_max=50, noise_range=(0.05, 0.5)):
    """A well-conditioned random training problem plus query points."""
    n = int(rng.integers(5, n_max + 1))
    d = int(rng.integers(1, 3))
    X = rng.uniform(0.0, 5.0, size=(n, d))
    sf2 = float(rng.uniform(0.5, 1.5))
    ls = rng.uniform(0.7, 2.5, size=d)
    noise = float(rng.uniform(*noise_range))
    beta = rng.uniform(-1.0, 1.0, size=2 * d + 1)
    H = np.array([oracle_basis(row) for row in X])
    y = H @ beta + rng.normal(0.0, math.sqrt(sf2), size=n)
    queries = rng.uniform(0.0, 5.0, size=(5, d))
    return X, y, sf2, tuple(ls), noise, beta, queries


# -- synthetic bench data -------------------------------------------------------


def square_force_true(theta):
    # gently saturating, monotone over the tested window
    return 1.7 + 0.023 * theta - 5e-5 * theta**2


def square_return_true(theta):
    return 180.0 if theta <= 70.0 else 180.0 - 0.25 * (theta - 70.0)


def curve_force_true(theta, thickness):
    return 0.3 + 0.02 * theta - 5e-5 * theta**2 + 4.0 * thickness**2


def curve_return_true(theta):
    return 180.0 if theta <= 90.0 else 180.0 - 0.3 * (theta - 90.0)


def square_bench_csv(rng, runs=3, force_noise=0.05, return_noise=1.0):
    lines = ["family,thickness_mm,deformation_angle_deg,direction,force_n,return_angle_deg,run_id"]
    for theta in range(10, 171, 10):
        for run in range(1, runs + 1):
            f = max(0.0, square_force_true(theta) + rng.normal(0.0, force_noise))
            r = min(180.0, max(0.0, square_return_true(theta) + rng.normal(0.0, return_noise)))
            lines.append(f"square_sym,,{theta},forward,{f!r},{r!r},r{run}")
    return "\n".join(lines) + "\n"


def curve_bench_csv(rng, runs=3, force_noise=0.08, return_noise=1.0):
    lines = ["family,thickness_mm,deformation_angle_deg,direction,force_n,return_angle_deg,run_id"]
    for thickness in (0.4, 0.8, 1.2, 1.6):
        for theta in range(30, 151, 15):
            for run in range(1, runs + 1):
                f = max(0.0, curve_force_true(theta, thickness) + rng.normal(0.0, force_noise))
                r = min(180.0, max(0.0, curve_return_true(theta) + rng.normal(0.0, return_noise)))
                lines.append(f"curve,{thickness},{theta},forward,{f!r},{r!r},r{run}")
    return "\n".join(lines) + "\n"


@pytest.fixture
def square_dataset() -> JointDataset:
    rng = np.random.default_rng(7)
    return parse_measurements(square_bench_csv(rng), source="square-fixture")


@pytest.fixture
def curve_dataset() -> JointDataset:
    rng = np.random.default_rng(11)
    return parse_measurements(curve_bench_csv(rng), source="curve-fixture")
