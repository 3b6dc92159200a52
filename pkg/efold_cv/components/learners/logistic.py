import logging
from typing import Self

import numpy as np

from efold_cv.components.learners.base import (
    Classifier,
    Vector,
    argmax_lowest,
)
from efold_cv.utils.typing import FloatArray

logger = logging.getLogger(__name__)

_MAX_HALVINGS = 60


def _log_softmax(logits: FloatArray) -> FloatArray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


class LogisticRegression(Classifier):
    """Multinomial logistic regression fit by batch gradient descent.

    Minimizes the mean log-loss plus ``regularization / (2n) * ||W||^2``; the
    intercepts are not penalized. The step size is found by Armijo
    backtracking, starting from twice the previously accepted step.
    """

    def __init__(
        self,
        class_count: int,
        regularization: float = 1.0,
        max_iter: int = 1000,
        tol: float = 1e-6,
    ) -> None:
        super().__init__(class_count)
        self.regularization = regularization
        self.max_iter = max_iter
        self.tol = tol
        self.n_iter_ = 0

    def _loss(self, X: FloatArray, onehot: FloatArray, W: FloatArray, b: FloatArray) -> float:
        n = X.shape[0]
        log_p = _log_softmax(X @ W + b)
        data_term = -float((onehot * log_p).sum()) / n
        return data_term + self.regularization / (2 * n) * float((W**2).sum())

    def fit(self, X: FloatArray, y: Vector) -> Self:
        n, d = X.shape
        onehot = np.zeros((n, self.class_count))
        onehot[np.arange(n), np.asarray(y, dtype=np.int64)] = 1.0
        W = np.zeros((d, self.class_count))
        b = np.zeros(self.class_count)
        loss = self._loss(X, onehot, W, b)
        step = 1.0
        for iteration in range(1, self.max_iter + 1):
            residual = np.exp(_log_softmax(X @ W + b)) - onehot
            grad_W = X.T @ residual / n + self.regularization / n * W
            grad_b = residual.sum(axis=0) / n
            grad_sq = float((grad_W**2).sum() + (grad_b**2).sum())
            self.n_iter_ = iteration
            if np.sqrt(grad_sq) < self.tol:
                break
            step *= 2.0
            for _ in range(_MAX_HALVINGS):
                W_next = W - step * grad_W
                b_next = b - step * grad_b
                next_loss = self._loss(X, onehot, W_next, b_next)
                if next_loss <= loss - 0.5 * step * grad_sq:
                    break
                step *= 0.5
            else:
                logger.debug("Backtracking found no descent step at iteration=%s", iteration)
                break
            W, b, loss = W_next, b_next, next_loss
        self.coef_ = W
        self.intercept_ = b
        return self

    def predict(self, X: FloatArray) -> Vector:
        return argmax_lowest(X @ self.coef_ + self.intercept_)
