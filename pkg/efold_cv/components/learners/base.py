import abc
from typing import Self

import numpy as np

from efold_cv.utils.typing import FloatArray, IntArray

Vector = FloatArray | IntArray


class Estimator(abc.ABC):
    @abc.abstractmethod
    def fit(self, X: FloatArray, y: Vector) -> Self:
        pass

    @abc.abstractmethod
    def predict(self, X: FloatArray) -> Vector:
        pass


class Classifier(Estimator, abc.ABC):
    def __init__(self, class_count: int) -> None:
        if class_count < 1:
            raise ValueError(f"class_count must be positive, got {class_count}")
        self.class_count = class_count


class ConstantClassifier(Classifier):
    """Predicts the single label seen during training."""

    def fit(self, X: FloatArray, y: Vector) -> Self:
        counts = np.bincount(np.asarray(y, dtype=np.int64), minlength=self.class_count)
        self.label_ = int(np.argmax(counts))
        return self

    def predict(self, X: FloatArray) -> Vector:
        return np.full(X.shape[0], self.label_, dtype=np.int64)


def argmax_lowest(scores: FloatArray) -> IntArray:
    """Row-wise argmax; ties go to the lowest column index."""
    return np.argmax(scores, axis=1).astype(np.int64)
