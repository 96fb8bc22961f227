"""Regression models for the safety and objective surfaces.

Two interchangeable model families sit behind one interface: an exact
Gaussian-process regressor (squared-exponential kernel, Cholesky solve) and a
ridge-stabilized linear least-squares model.  Targets are standardized inside
`fit` and de-standardized in `predict`, so hyperparameters are expressed on
the standardized scale.  The module also provides the expected-improvement
acquisition used by the optimization-only baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.special import ndtr

__all__ = [
    "ModelKind",
    "ModelParams",
    "Dataset",
    "Prediction",
    "ModelError",
    "GaussianProcess",
    "LinearModel",
    "GridKernel",
    "OnlineGridGP",
    "fit",
    "predict",
    "expected_improvement",
    "expected_improvement_vec",
    "kernel_matrix",
]

# Jitter ladder tried when the kernel Cholesky fails outright.
_JITTERS = (0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)


class ModelError(RuntimeError):
    """Raised when a model cannot be fitted or is used before fitting."""


class ModelKind(str, Enum):
    GAUSSIAN_PROCESS = "gaussian-process"
    LINEAR = "linear"


@dataclass(frozen=True)
class ModelParams:
    """Model hyperparameters on normalized inputs / standardized targets.

    length_scale: shared squared-exponential length scale.
    noise_var: observation-noise variance relative to target variance.
    ridge: Tikhonov term stabilizing the linear least-squares solve.
    """

    length_scale: float = 0.5
    noise_var: float = 1e-4
    ridge: float = 1e-8


@dataclass(frozen=True)
class Prediction:
    mean: float
    stddev: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.stddev)):
            raise ValueError("prediction must be finite")
        if self.stddev < 0:
            raise ValueError("stddev must be nonnegative")


class Dataset:
    """Paired training inputs (normalized vectors) and scalar targets."""

    def __init__(self, inputs: Sequence[Sequence[float]], targets: Sequence[float]):
        X = np.atleast_2d(np.asarray(inputs, dtype=float))
        y = np.asarray(targets, dtype=float).ravel()
        if X.shape[0] != y.shape[0]:
            raise ValueError("inputs and targets must have equal length")
        if X.size and not np.all(np.isfinite(X)):
            raise ValueError("inputs must be finite")
        if y.size and not np.all(np.isfinite(y)):
            raise ValueError("targets must be finite")
        self.inputs = X
        self.targets = y

    def __len__(self) -> int:
        return self.targets.shape[0]


def _standardize(y: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Center and scale targets.

    The scale is floored at a fraction of the mean magnitude: a handful of
    near-identical targets must not collapse the prior variance to zero, or
    every faraway point would be certified with absurd confidence.  The floor
    only affects predictive uncertainty; posterior means are invariant to the
    standardization scale.
    """
    mu = float(np.mean(y))
    sigma = max(float(np.std(y)), 0.15 * abs(mu))
    if sigma == 0.0:
        sigma = 1.0
    return (y - mu) / sigma, mu, sigma


def kernel_matrix(a: np.ndarray, b: np.ndarray, length_scale: float) -> np.ndarray:
    """Unit-variance squared-exponential kernel between two point sets."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    d2 = (
        np.sum(a * a, axis=1)[:, None]
        + np.sum(b * b, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    np.maximum(d2, 0.0, out=d2)
    return np.exp(d2 * (-0.5 / (length_scale * length_scale)))


def chol_with_jitter(K: np.ndarray, noise_var: float) -> tuple[np.ndarray, float]:
    """Lower Cholesky of K + (noise + jitter) I, escalating jitter on failure."""
    n = K.shape[0]
    eye = np.eye(n)
    for jitter in _JITTERS:
        try:
            L = cholesky(K + (noise_var + jitter) * eye, lower=True)
            return L, jitter
        except np.linalg.LinAlgError:
            continue
        except ValueError:
            continue
    raise ModelError("kernel matrix is not positive definite even with jitter 1e-4")


class GaussianProcess:
    """Exact GP regression with a shared-length-scale squared-exponential kernel.

    Signal variance is pinned to the (standardized) target variance, i.e. 1,
    and no hyperparameter optimization is performed, keeping per-fit cost
    predictable inside a control loop.
    """

    kind = ModelKind.GAUSSIAN_PROCESS

    def __init__(
        self,
        data: Dataset,
        params: ModelParams = ModelParams(),
        gram: np.ndarray | None = None,
    ):
        if len(data) == 0:
            raise ModelError("cannot fit a GP on an empty dataset")
        self.params = params
        self._X = data.inputs
        y_std, self._y_mu, self._y_sigma = _standardize(data.targets)
        K = gram if gram is not None else kernel_matrix(self._X, self._X, params.length_scale)
        self._L, self.jitter = chol_with_jitter(K, params.noise_var)
        self._alpha = cho_solve((self._L, True), y_std, check_finite=False)

    def predict_gram(self, Kq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior from a precomputed cross-kernel block (queries x train)."""
        mean_std = Kq @ self._alpha
        V = solve_triangular(self._L, Kq.T, lower=True, check_finite=False)
        var = 1.0 - np.sum(V * V, axis=0)
        np.clip(var, 0.0, None, out=var)
        mean = mean_std * self._y_sigma + self._y_mu
        std = np.sqrt(var) * self._y_sigma
        return mean, std

    def predict_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and stddev at each query row."""
        Kq = kernel_matrix(np.atleast_2d(X), self._X, self.params.length_scale)
        return self.predict_gram(Kq)

    def predict(self, x: Sequence[float]) -> Prediction:
        mean, std = self.predict_batch(np.asarray(x, dtype=float)[None, :])
        return Prediction(float(mean[0]), float(std[0]))


class LinearModel:
    """Least-squares linear model with intercept and a small ridge term."""

    kind = ModelKind.LINEAR

    def __init__(self, data: Dataset, params: ModelParams = ModelParams()):
        if len(data) == 0:
            raise ModelError("cannot fit a linear model on an empty dataset")
        self.params = params
        y_std, self._y_mu, self._y_sigma = _standardize(data.targets)
        A = np.hstack([np.ones((len(data), 1)), data.inputs])
        gram = A.T @ A + params.ridge * np.eye(A.shape[1])
        # The ridge keeps this solvable for rank-deficient designs.
        self._coef = np.linalg.solve(gram, A.T @ y_std)

    def predict_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        X = np.atleast_2d(X)
        mean_std = self._coef[0] + X @ self._coef[1:]
        mean = mean_std * self._y_sigma + self._y_mu
        return mean, np.zeros_like(mean)

    def predict(self, x: Sequence[float]) -> Prediction:
        mean, std = self.predict_batch(np.asarray(x, dtype=float)[None, :])
        return Prediction(float(mean[0]), float(std[0]))


Model = GaussianProcess | LinearModel


def fit(kind: ModelKind | str, data: Dataset, params: ModelParams = ModelParams()) -> Model:
    """Train a model of the requested kind; deterministic given inputs."""
    kind = ModelKind(kind)
    if kind is ModelKind.GAUSSIAN_PROCESS:
        return GaussianProcess(data, params)
    return LinearModel(data, params)


def predict(model: Model, x: Sequence[float]) -> Prediction:
    return model.predict(x)


class GridKernel:
    """Cached kernel values between every pair of points of a fixed grid.

    Every training or query point in the control loop is a grid point, so
    kernel evaluations reduce to row/column lookups into one precomputed
    matrix.  ~29 MB for a 1920-point grid.
    """

    def __init__(self, norm_grid: np.ndarray, length_scale: float):
        self.length_scale = length_scale
        self.K = kernel_matrix(norm_grid, norm_grid, length_scale)

    def block(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        return self.K[np.ix_(np.asarray(rows, dtype=int), np.asarray(cols, dtype=int))]


class OnlineGridGP:
    """GP over a fixed grid, grown one observation per step.

    Maintains the Cholesky factor and the whitened cross-kernel to the whole
    grid incrementally, so adding a sample costs O(n * grid) instead of a full
    refit.  Predictions match a from-scratch GP with the same fixed noise.
    """

    def __init__(self, kern: GridKernel, noise_var: float = 1e-4):
        self._kern = kern
        self._noise = noise_var
        m = kern.K.shape[0]
        self._m = m
        self._cap = 64
        self._L = np.zeros((self._cap, self._cap))
        self._V = np.zeros((self._cap, m))
        self._v_acc = np.zeros(m)
        self._ids: list[int] = []
        self._y: list[float] = []

    def __len__(self) -> int:
        return len(self._ids)

    def _grow(self) -> None:
        cap = self._cap * 2
        L = np.zeros((cap, cap))
        V = np.zeros((cap, self._m))
        n = len(self._ids)
        L[:n, :n] = self._L[:n, :n]
        V[:n] = self._V[:n]
        self._L, self._V, self._cap = L, V, cap

    def add(self, cid: int, y: float) -> None:
        n = len(self._ids)
        if n == self._cap:
            self._grow()
        k_grid = self._kern.K[cid]
        k_self = 1.0 + self._noise
        if n == 0:
            ell = math.sqrt(k_self)
            self._L[0, 0] = ell
            self._V[0] = k_grid / ell
        else:
            k_tr = self._kern.K[cid, self._ids]
            a = solve_triangular(
                self._L[:n, :n], k_tr, lower=True, check_finite=False
            )
            d2 = k_self - float(a @ a)
            # The Schur complement is bounded below by the noise term.
            ell = math.sqrt(max(d2, 0.5 * self._noise))
            self._L[n, :n] = a
            self._L[n, n] = ell
            self._V[n] = (k_grid - a @ self._V[:n]) / ell
        self._v_acc += self._V[n] * self._V[n]
        self._ids.append(int(cid))
        self._y.append(float(y))

    def predict_all(self) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and stddev at every grid point."""
        n = len(self._ids)
        if n == 0:
            raise ModelError("no observations yet")
        y_std, mu, sigma = _standardize(np.array(self._y))
        beta = solve_triangular(
            self._L[:n, :n], y_std, lower=True, check_finite=False
        )
        mean = (beta @ self._V[:n]) * sigma + mu
        var = np.clip(1.0 - self._v_acc, 0.0, None)
        return mean, np.sqrt(var) * sigma

    @property
    def observed_ids(self) -> list[int]:
        return list(self._ids)

    @property
    def best_target(self) -> float:
        return max(self._y)


_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def expected_improvement(pred: Prediction, best_so_far: float) -> float:
    """Expected improvement of a Gaussian belief over the incumbent (maximization)."""
    improve = pred.mean - best_so_far
    if pred.stddev == 0.0:
        return max(improve, 0.0)
    z = improve / pred.stddev
    phi_cdf = 0.5 * (1.0 + math.erf(z / _SQRT2))
    phi_pdf = _INV_SQRT_2PI * math.exp(-0.5 * z * z)
    return max(improve * phi_cdf + pred.stddev * phi_pdf, 0.0)


def expected_improvement_vec(
    mean: np.ndarray, std: np.ndarray, best_so_far: float
) -> np.ndarray:
    """Vectorized expected improvement; identical formula to the scalar op."""
    improve = mean - best_so_far
    out = np.maximum(improve, 0.0)
    pos = std > 0.0
    if np.any(pos):
        z = improve[pos] / std[pos]
        pdf = _INV_SQRT_2PI * np.exp(-0.5 * z * z)
        out[pos] = np.maximum(improve[pos] * ndtr(z) + std[pos] * pdf, 0.0)
    return out
