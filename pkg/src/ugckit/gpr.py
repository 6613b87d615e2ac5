"""Gaussian process regression with an explicit polynomial mean basis.

The regression model used throughout the toolkit is

    y = h(x)' beta + f(x) + e,        f ~ GP(0, k),  e ~ N(0, noise_variance)

where h(x) is the pure-quadratic basis [1, x_1..x_d, x_1^2..x_d^2] (2d+1
terms, d in {1, 2}) and k is the squared-exponential kernel

    k(a, b) = signal_variance * exp(-0.5 * sum_j ((a_j - b_j) / l_j)^2).

beta is either supplied by the caller or estimated by generalized least
squares. Fitting factorizes K + noise*I once with a Cholesky decomposition;
no explicit matrix inverse is ever formed (a dense-inverse formulation
exists only as an independent oracle in the test suite).

Everything returned by fit() is immutable, so a fitted model can be shared
freely across threads. Grid search in tune_hyperparams evaluates candidates
in a fixed order and breaks ties toward the earlier candidate, so the result
is reproducible run to run.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    DimensionMismatchError,
    EmptyGridError,
    NotPositiveDefiniteError,
    UnsupportedDimensionError,
)

CHOLESKY_JITTER = 1e-8
VARIANCE_CLAMP = 1e-10


@dataclass(frozen=True)
class KernelHyperParams:
    """Squared-exponential kernel hyperparameters.

    signal_variance is the prior variance of the residual process; one
    positive length scale per input dimension.
    """

    signal_variance: float
    length_scales: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "length_scales", tuple(float(l) for l in self.length_scales))
        if self.signal_variance < 0:
            raise ValueError(f"signal_variance must be >= 0, got {self.signal_variance}")
        if not self.length_scales or any(l <= 0 for l in self.length_scales):
            raise ValueError(f"length scales must all be > 0, got {self.length_scales}")

    @property
    def dim(self) -> int:
        return len(self.length_scales)


def _as_points(x) -> np.ndarray:
    """Coerce input points to an (n, d) float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatchError(f"expected 1-D or 2-D input array, got shape {arr.shape}")
    return arr


def _as_point(x) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise DimensionMismatchError(f"expected a single point, got shape {arr.shape}")
    return arr


def kernel_se(a, b, hyper: KernelHyperParams) -> float:
    """Squared-exponential covariance between two points.

    Symmetric in its arguments and equal to signal_variance when a == b.
    """
    av, bv = _as_point(a), _as_point(b)
    if av.shape != bv.shape or av.shape[0] != hyper.dim:
        raise DimensionMismatchError(
            f"points of dim {av.shape[0]}/{bv.shape[0]} vs {hyper.dim} length scales"
        )
    z = (av - bv) / np.asarray(hyper.length_scales)
    return float(hyper.signal_variance * math.exp(-0.5 * float(z @ z)))


def kernel_matrix(xa, xb, hyper: KernelHyperParams) -> np.ndarray:
    """Cross-covariance matrix K[i, j] = k(xa_i, xb_j)."""
    A, B = _as_points(xa), _as_points(xb)
    if A.shape[1] != hyper.dim or B.shape[1] != hyper.dim:
        raise DimensionMismatchError(
            f"points of dim {A.shape[1]}/{B.shape[1]} vs {hyper.dim} length scales"
        )
    ls = np.asarray(hyper.length_scales)
    sq = np.zeros((A.shape[0], B.shape[0]))
    for j in range(A.shape[1]):
        sq += ((A[:, j : j + 1] - B[:, j : j + 1].T) / ls[j]) ** 2
    return hyper.signal_variance * np.exp(-0.5 * sq)


def basis_expand(x) -> np.ndarray:
    """Pure-quadratic basis vector [1, x_1..x_d, x_1^2..x_d^2] (length 2d+1).

    For 2-D inputs the convention is angle first, thickness second, matching
    the built-in coefficient ordering [1, angle, T, angle^2, T^2].
    """
    xv = _as_point(x)
    d = xv.shape[0]
    if d not in (1, 2):
        raise UnsupportedDimensionError(f"basis covers d in {{1, 2}}, got d={d}")
    return np.concatenate(([1.0], xv, xv**2))


def basis_matrix(X) -> np.ndarray:
    pts = _as_points(X)
    if pts.shape[1] not in (1, 2):
        raise UnsupportedDimensionError(f"basis covers d in {{1, 2}}, got d={pts.shape[1]}")
    return np.hstack([np.ones((pts.shape[0], 1)), pts, pts**2])


def _factorize(K: np.ndarray, noise_variance: float):
    """Cholesky of K + noise*I with a single +1e-8 jitter retry."""
    A = K + noise_variance * np.eye(K.shape[0])
    try:
        c, low = cho_factor(A, lower=True)
    except np.linalg.LinAlgError:
        try:
            c, low = cho_factor(A + CHOLESKY_JITTER * np.eye(K.shape[0]), lower=True)
        except np.linalg.LinAlgError:
            raise NotPositiveDefiniteError(
                "kernel matrix not positive definite even with jitter"
            ) from None
    return c


def _has_duplicate_rows(X: np.ndarray) -> bool:
    return np.unique(X, axis=0).shape[0] < X.shape[0]


def _gls_beta(H: np.ndarray, y: np.ndarray, L: np.ndarray) -> np.ndarray:
    """Generalized least squares: argmin_b (y - Hb)' A^-1 (y - Hb)."""
    W = cho_solve((L, True), H)
    M = H.T @ W
    rhs = H.T @ cho_solve((L, True), y)
    try:
        return np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        # rank-deficient design (e.g. fewer points than basis terms):
        # fall back to the minimum-norm solution
        return np.linalg.pinv(M) @ rhs


@dataclass(frozen=True)
class FittedGP:
    """A trained model; immutable, safe for concurrent predict() calls."""

    beta: np.ndarray
    noise_variance: float
    hyper: KernelHyperParams
    train_x: np.ndarray  # (n, d)
    train_y: np.ndarray  # (n,)
    chol_factor: np.ndarray  # lower-triangular L with L L' = K + noise*I
    alpha: np.ndarray  # (K + noise*I)^-1 (y - H beta)

    def __post_init__(self):
        for name in ("beta", "train_x", "train_y", "chol_factor", "alpha"):
            getattr(self, name).setflags(write=False)

    @property
    def input_dim(self) -> int:
        return self.train_x.shape[1]

    def predict(self, x_star) -> tuple[float, float]:
        return predict(self, x_star)


def fit(X, y, hyper: KernelHyperParams, noise_variance: float, beta="gls") -> FittedGP:
    """Fit the GP to training inputs X (n x d) and targets y (n,).

    beta: "gls" to estimate the mean coefficients by generalized least
    squares, or an explicit vector of length 2d+1 to hold them fixed.
    With zero noise the inputs must be distinct, otherwise K is singular.
    """
    Xm = _as_points(X)
    yv = np.asarray(y, dtype=float).ravel()
    n, d = Xm.shape
    if n < 1 or yv.shape[0] != n:
        raise DimensionMismatchError(f"X has {n} rows but y has {yv.shape[0]} entries")
    if d != hyper.dim:
        raise DimensionMismatchError(f"X dim {d} vs {hyper.dim} length scales")
    if noise_variance < 0:
        raise ValueError(f"noise_variance must be >= 0, got {noise_variance}")
    if noise_variance == 0.0 and _has_duplicate_rows(Xm):
        raise NotPositiveDefiniteError("duplicate training rows with zero noise variance")

    K = kernel_matrix(Xm, Xm, hyper)
    L = _factorize(K, noise_variance)
    H = basis_matrix(Xm)

    if isinstance(beta, str):
        if beta != "gls":
            raise ValueError(f"beta must be 'gls' or a coefficient vector, got {beta!r}")
        beta_vec = _gls_beta(H, yv, L)
    else:
        beta_vec = np.asarray(beta, dtype=float).ravel()
        if beta_vec.shape[0] != H.shape[1]:
            raise DimensionMismatchError(
                f"beta has {beta_vec.shape[0]} terms, basis needs {H.shape[1]}"
            )

    alpha = cho_solve((L, True), yv - H @ beta_vec)
    return FittedGP(
        beta=beta_vec,
        noise_variance=float(noise_variance),
        hyper=hyper,
        train_x=Xm.copy(),
        train_y=yv.copy(),
        chol_factor=np.tril(L),
        alpha=alpha,
    )


def predict(model: FittedGP, x_star) -> tuple[float, float]:
    """Posterior mean and variance at a single query point.

    mean = h(x)' beta + k_*' alpha
    var  = k(x, x) - k_*' (K + noise*I)^-1 k_*   (clamped to 0 from below;
    the clamp only absorbs rounding on the order of 1e-10)
    """
    xq = _as_point(x_star)
    if xq.shape[0] != model.input_dim:
        raise DimensionMismatchError(
            f"query dim {xq.shape[0]} vs training dim {model.input_dim}"
        )
    k_star = kernel_matrix(xq[None, :], model.train_x, model.hyper)[0]
    mean = float(basis_expand(xq) @ model.beta + k_star @ model.alpha)
    v = cho_solve((model.chol_factor, True), k_star)
    variance = float(kernel_se(xq, xq, model.hyper) - k_star @ v)
    if variance < 0.0:
        variance = 0.0
    return mean, variance


def log_marginal_likelihood(X, y, hyper: KernelHyperParams, noise_variance: float, beta) -> float:
    """Gaussian log marginal likelihood of y under the model with fixed beta.

    Computed through the Cholesky factor:
        -0.5 r' A^-1 r - 0.5 log det A - (n/2) log 2 pi,   r = y - H beta.
    """
    Xm = _as_points(X)
    yv = np.asarray(y, dtype=float).ravel()
    if noise_variance == 0.0 and _has_duplicate_rows(Xm):
        raise NotPositiveDefiniteError("duplicate training rows with zero noise variance")
    K = kernel_matrix(Xm, Xm, hyper)
    L = _factorize(K, noise_variance)
    r = yv - basis_matrix(Xm) @ np.asarray(beta, dtype=float).ravel()
    quad = float(r @ cho_solve((L, True), r))
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    n = yv.shape[0]
    return -0.5 * quad - 0.5 * logdet - 0.5 * n * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GridSpec:
    """Finite hyperparameter grid: candidates per axis, searched exhaustively.

    length_scale_grids holds one candidate sequence per input dimension.
    Candidates are usually log-spaced (np.geomspace); any finite positive
    values are accepted.
    """

    signal_variances: tuple[float, ...]
    length_scale_grids: tuple[tuple[float, ...], ...]
    noise_variances: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "signal_variances", tuple(self.signal_variances))
        object.__setattr__(
            self, "length_scale_grids", tuple(tuple(g) for g in self.length_scale_grids)
        )
        object.__setattr__(self, "noise_variances", tuple(self.noise_variances))


def tune_hyperparams(X, y, search: GridSpec) -> tuple[KernelHyperParams, float]:
    """Pick the grid candidate maximizing the log marginal likelihood.

    beta is re-estimated by GLS for every candidate before scoring. The scan
    order is the deterministic cartesian product of the grid axes and ties
    keep the earlier candidate, so repeated runs return the same answer.
    Candidates whose kernel matrix cannot be factorized are skipped.
    """
    if (
        not search.signal_variances
        or not search.noise_variances
        or not search.length_scale_grids
        or any(not g for g in search.length_scale_grids)
    ):
        raise EmptyGridError("every grid axis needs at least one candidate")

    Xm = _as_points(X)
    yv = np.asarray(y, dtype=float).ravel()
    H = basis_matrix(Xm)

    best_ll = -math.inf
    best = None
    for sf2 in search.signal_variances:
        for ls in itertools.product(*search.length_scale_grids):
            hyper = KernelHyperParams(sf2, ls)
            K = kernel_matrix(Xm, Xm, hyper)
            for noise in search.noise_variances:
                try:
                    L = _factorize(K, noise)
                except NotPositiveDefiniteError:
                    continue
                beta = _gls_beta(H, yv, L)
                r = yv - H @ beta
                quad = float(r @ cho_solve((L, True), r))
                logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
                ll = -0.5 * quad - 0.5 * logdet - 0.5 * yv.shape[0] * math.log(2.0 * math.pi)
                if ll > best_ll:
                    best_ll = ll
                    best = (hyper, float(noise))
    if best is None:
        raise NotPositiveDefiniteError("no grid candidate produced a factorizable kernel")
    return best
