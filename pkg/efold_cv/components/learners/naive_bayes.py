from typing import Self

import numpy as np

from efold_cv.components.learners.base import (
    Classifier,
    Vector,
    argmax_lowest,
)
from efold_cv.utils.typing import FloatArray


class GaussianNB(Classifier):
    """Per-class, per-feature Gaussian likelihoods with empirical priors.

    Every variance is smoothed by ``var_smoothing`` times the largest feature
    variance of the training data. Classes missing from the training data get
    a prior of zero and are never predicted.
    """

    def __init__(self, class_count: int, var_smoothing: float = 1e-9) -> None:
        super().__init__(class_count)
        self.var_smoothing = var_smoothing

    def fit(self, X: FloatArray, y: Vector) -> Self:
        y = np.asarray(y, dtype=np.int64)
        n, d = X.shape
        epsilon = self.var_smoothing * float(X.var(axis=0).max())
        if epsilon == 0.0:
            # every feature constant
            epsilon = self.var_smoothing
        self.theta_ = np.zeros((self.class_count, d))
        self.var_ = np.ones((self.class_count, d))
        self.log_prior_ = np.full(self.class_count, -np.inf)
        for label in range(self.class_count):
            members = X[y == label]
            if members.shape[0] == 0:
                continue
            self.theta_[label] = members.mean(axis=0)
            self.var_[label] = members.var(axis=0) + epsilon
            self.log_prior_[label] = np.log(members.shape[0] / n)
        return self

    def joint_log_likelihood(self, X: FloatArray) -> FloatArray:
        normalizer = -0.5 * np.log(2.0 * np.pi * self.var_).sum(axis=1)
        squared = ((X[:, None, :] - self.theta_[None, :, :]) ** 2 / self.var_).sum(axis=2)
        return self.log_prior_ + normalizer - 0.5 * squared

    def predict(self, X: FloatArray) -> Vector:
        return argmax_lowest(self.joint_log_likelihood(X))
