"""Linear regression family: least squares, ridge and lasso.

All three fit on centered data and recover the intercept afterwards, so the
intercept is never penalized.
"""

import logging
from typing import Self

import numpy as np

from efold_cv.components.learners.base import Estimator, Vector
from efold_cv.utils.typing import FloatArray

logger = logging.getLogger(__name__)


class _CenteredLinearModel(Estimator):
    coef_: FloatArray
    intercept_: float

    def fit(self, X: FloatArray, y: Vector) -> Self:
        y = np.asarray(y, dtype=np.float64)
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        self.coef_ = self._solve(X - x_mean, y - y_mean)
        self.intercept_ = y_mean - float(x_mean @ self.coef_)
        return self

    def _solve(self, Xc: FloatArray, yc: FloatArray) -> FloatArray:
        raise NotImplementedError

    def predict(self, X: FloatArray) -> Vector:
        return X @ self.coef_ + self.intercept_


class LinearRegression(_CenteredLinearModel):
    """Ordinary least squares via SVD; minimum-norm on rank deficiency."""

    def _solve(self, Xc: FloatArray, yc: FloatArray) -> FloatArray:
        coef, _, rank, _ = np.linalg.lstsq(Xc, yc, rcond=None)
        if rank < Xc.shape[1]:
            logger.debug("Rank deficient design rank=%s columns=%s", rank, Xc.shape[1])
        return coef


class Ridge(_CenteredLinearModel):
    def __init__(self, alpha: float = 1.0) -> None:
        self.alpha = alpha

    def _solve(self, Xc: FloatArray, yc: FloatArray) -> FloatArray:
        gram = Xc.T @ Xc + self.alpha * np.eye(Xc.shape[1])
        return np.linalg.solve(gram, Xc.T @ yc)


def soft_threshold(rho: float, threshold: float) -> float:
    if rho > threshold:
        return rho - threshold
    if rho < -threshold:
        return rho + threshold
    return 0.0


class Lasso(_CenteredLinearModel):
    """Cyclic coordinate descent on (1 / 2n) * ||y - Xw||^2 + alpha * ||w||_1."""

    def __init__(self, alpha: float = 1.0, tol: float = 1e-4, max_sweeps: int = 1000):
        self.alpha = alpha
        self.tol = tol
        self.max_sweeps = max_sweeps
        self.n_sweeps_ = 0

    def _solve(self, Xc: FloatArray, yc: FloatArray) -> FloatArray:
        n, d = Xc.shape
        coef = np.zeros(d)
        residual = yc.copy()
        column_norms = (Xc**2).sum(axis=0)
        threshold = n * self.alpha
        for sweep in range(1, self.max_sweeps + 1):
            max_change = 0.0
            for j in range(d):
                if column_norms[j] == 0.0:
                    continue
                old = coef[j]
                rho = float(Xc[:, j] @ residual) + column_norms[j] * old
                new = soft_threshold(rho, threshold) / column_norms[j]
                if new != old:
                    residual -= Xc[:, j] * (new - old)
                    coef[j] = new
                max_change = max(max_change, abs(new - old))
            self.n_sweeps_ = sweep
            if max_change < self.tol:
                break
        else:
            logger.debug("Lasso hit max_sweeps=%s without converging", self.max_sweeps)
        return coef
