from typing import Self

import numpy as np

from efold_cv.components.learners.base import (
    Classifier,
    Estimator,
    Vector,
    argmax_lowest,
)
from efold_cv.utils.typing import FloatArray, IndexArray

_QUERY_CHUNK = 256


def nearest_neighbors(
    train: FloatArray, queries: FloatArray, k: int
) -> IndexArray:
    """Indices of the k closest training rows per query (Euclidean).

    Equal distances keep training order, so the earlier row wins.
    """
    k = min(k, train.shape[0])
    result = np.empty((queries.shape[0], k), dtype=np.intp)
    for start in range(0, queries.shape[0], _QUERY_CHUNK):
        chunk = queries[start : start + _QUERY_CHUNK]
        diff = chunk[:, None, :] - train[None, :, :]
        distances = np.sqrt((diff**2).sum(axis=2))
        result[start : start + chunk.shape[0]] = np.argsort(
            distances, axis=1, kind="stable"
        )[:, :k]
    return result


class KNNClassifier(Classifier):
    def __init__(self, class_count: int, k: int = 5) -> None:
        super().__init__(class_count)
        if k < 1:
            raise ValueError(f"k must be positive, got {k}")
        self.k = k

    def fit(self, X: FloatArray, y: Vector) -> Self:
        self.X_ = X
        self.y_ = np.asarray(y, dtype=np.int64)
        return self

    def predict(self, X: FloatArray) -> Vector:
        neighbors = nearest_neighbors(self.X_, X, self.k)
        votes = np.zeros((X.shape[0], self.class_count))
        rows = np.repeat(np.arange(X.shape[0]), neighbors.shape[1])
        np.add.at(votes, (rows, self.y_[neighbors].ravel()), 1.0)
        return argmax_lowest(votes)


class KNNRegressor(Estimator):
    def __init__(self, k: int = 5) -> None:
        if k < 1:
            raise ValueError(f"k must be positive, got {k}")
        self.k = k

    def fit(self, X: FloatArray, y: Vector) -> Self:
        self.X_ = X
        self.y_ = np.asarray(y, dtype=np.float64)
        return self

    def predict(self, X: FloatArray) -> Vector:
        neighbors = nearest_neighbors(self.X_, X, self.k)
        return self.y_[neighbors].mean(axis=1)
