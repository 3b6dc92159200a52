"""CART trees grown to purity.

Candidate thresholds are midpoints between consecutive distinct values of a
feature; rows with ``x <= threshold`` go left. Among equally good splits the
lowest feature index wins, then the lowest threshold.
"""

from typing import NamedTuple, Self

import numpy as np

from efold_cv.components.learners.base import Classifier, Estimator, Vector
from efold_cv.utils.typing import FloatArray, IndexArray, IntArray

_LEAF = -1


class Split(NamedTuple):
    feature: int
    threshold: float
    impurity: float


def _midpoint(low: float, high: float) -> float:
    threshold = (low + high) / 2.0
    # adjacent doubles: the midpoint may round up onto `high`
    return low if threshold >= high else threshold


def best_classification_split(
    X: FloatArray, y: IntArray, weights: FloatArray, class_count: int
) -> Split | None:
    """Split minimizing the weighted Gini impurity of the two children."""
    onehot = np.zeros((y.shape[0], class_count))
    onehot[np.arange(y.shape[0]), y] = weights
    total = onehot.sum(axis=0)
    best: Split | None = None
    for feature in range(X.shape[1]):
        order = np.argsort(X[:, feature], kind="stable")
        values = X[order, feature]
        boundaries = np.flatnonzero(values[:-1] < values[1:])
        if boundaries.size == 0:
            continue
        left = np.cumsum(onehot[order], axis=0)[boundaries]
        right = total - left
        w_left = left.sum(axis=1)
        w_right = right.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            impurity = np.where(w_left > 0, w_left - (left**2).sum(axis=1) / w_left, 0.0)
            impurity += np.where(
                w_right > 0, w_right - (right**2).sum(axis=1) / w_right, 0.0
            )
        i = int(np.argmin(impurity))
        if best is None or impurity[i] < best.impurity:
            b = boundaries[i]
            best = Split(feature, _midpoint(values[b], values[b + 1]), float(impurity[i]))
    return best


def best_regression_split(X: FloatArray, y: FloatArray) -> Split | None:
    """Split minimizing the summed squared error of the two children."""
    n = y.shape[0]
    total, total_sq = y.sum(), (y**2).sum()
    best: Split | None = None
    for feature in range(X.shape[1]):
        order = np.argsort(X[:, feature], kind="stable")
        values = X[order, feature]
        boundaries = np.flatnonzero(values[:-1] < values[1:])
        if boundaries.size == 0:
            continue
        sums = np.cumsum(y[order])[boundaries]
        sums_sq = np.cumsum(y[order] ** 2)[boundaries]
        n_left = boundaries + 1.0
        n_right = n - n_left
        sse = (sums_sq - sums**2 / n_left) + (
            (total_sq - sums_sq) - (total - sums) ** 2 / n_right
        )
        i = int(np.argmin(sse))
        if best is None or sse[i] < best.impurity:
            b = boundaries[i]
            best = Split(feature, _midpoint(values[b], values[b + 1]), float(sse[i]))
    return best


class _Tree(Estimator):
    """Flat-array binary tree built depth-first without recursion."""

    def __init__(self, min_samples_split: int = 2) -> None:
        self.min_samples_split = max(2, min_samples_split)

    def _is_pure(self, y: Vector) -> bool:
        raise NotImplementedError

    def _leaf_value(self, y: Vector, weights: FloatArray) -> float:
        raise NotImplementedError

    def _split(self, X: FloatArray, y: Vector, weights: FloatArray) -> Split | None:
        raise NotImplementedError

    def _grow(
        self, X: FloatArray, y: Vector, weights: FloatArray, max_depth: int | None
    ) -> None:
        feature: list[int] = []
        threshold: list[float] = []
        left: list[int] = []
        right: list[int] = []
        value: list[float] = []

        def add_node() -> int:
            feature.append(_LEAF)
            threshold.append(0.0)
            left.append(_LEAF)
            right.append(_LEAF)
            value.append(0.0)
            return len(feature) - 1

        stack = [(add_node(), np.arange(y.shape[0]), 0)]
        while stack:
            node, rows, depth = stack.pop()
            y_node, w_node = y[rows], weights[rows]
            value[node] = self._leaf_value(y_node, w_node)
            if (
                rows.size < self.min_samples_split
                or self._is_pure(y_node)
                or (max_depth is not None and depth >= max_depth)
            ):
                continue
            split = self._split(X[rows], y_node, w_node)
            if split is None:
                continue
            goes_left = X[rows, split.feature] <= split.threshold
            feature[node] = split.feature
            threshold[node] = split.threshold
            left[node] = add_node()
            right[node] = add_node()
            stack.append((right[node], rows[~goes_left], depth + 1))
            stack.append((left[node], rows[goes_left], depth + 1))

        self.feature_ = np.asarray(feature, dtype=np.intp)
        self.threshold_ = np.asarray(threshold)
        self.left_ = np.asarray(left, dtype=np.intp)
        self.right_ = np.asarray(right, dtype=np.intp)
        self.value_ = np.asarray(value)

    @property
    def node_count(self) -> int:
        return int(self.feature_.shape[0])

    def apply(self, X: FloatArray) -> IndexArray:
        """Leaf index reached by every row."""
        node = np.zeros(X.shape[0], dtype=np.intp)
        active = self.feature_[node] != _LEAF
        while active.any():
            rows = np.flatnonzero(active)
            current = node[rows]
            goes_left = X[rows, self.feature_[current]] <= self.threshold_[current]
            node[rows] = np.where(goes_left, self.left_[current], self.right_[current])
            active = self.feature_[node] != _LEAF
        return node


class DecisionTreeClassifier(_Tree, Classifier):
    def __init__(
        self, class_count: int, min_samples_split: int = 2, max_depth: int | None = None
    ) -> None:
        Classifier.__init__(self, class_count)
        _Tree.__init__(self, min_samples_split)
        self.max_depth = max_depth

    def _is_pure(self, y: Vector) -> bool:
        return bool((y == y[0]).all())

    def _leaf_value(self, y: Vector, weights: FloatArray) -> float:
        return float(np.argmax(np.bincount(y, weights=weights, minlength=self.class_count)))

    def _split(self, X: FloatArray, y: Vector, weights: FloatArray) -> Split | None:
        return best_classification_split(X, y, weights, self.class_count)

    def fit(self, X: FloatArray, y: Vector, sample_weight: FloatArray | None = None) -> Self:
        y = np.asarray(y, dtype=np.int64)
        weights = np.ones(y.shape[0]) if sample_weight is None else sample_weight
        self._grow(X, y, weights, self.max_depth)
        return self

    def predict(self, X: FloatArray) -> Vector:
        return self.value_[self.apply(X)].astype(np.int64)


class DecisionTreeRegressor(_Tree):
    def __init__(self, min_samples_split: int = 2) -> None:
        super().__init__(min_samples_split)

    def _is_pure(self, y: Vector) -> bool:
        return bool((y == y[0]).all())

    def _leaf_value(self, y: Vector, weights: FloatArray) -> float:
        # a pure leaf reproduces its target exactly
        return float(y[0]) if self._is_pure(y) else float(y.mean())

    def _split(self, X: FloatArray, y: Vector, weights: FloatArray) -> Split | None:
        return best_regression_split(X, y)

    def fit(self, X: FloatArray, y: Vector) -> Self:
        y = np.asarray(y, dtype=np.float64)
        self._grow(X, y, np.ones(y.shape[0]), None)
        return self

    def predict(self, X: FloatArray) -> Vector:
        return self.value_[self.apply(X)]


class DecisionStump(DecisionTreeClassifier):
    """Depth-one classification tree that honours sample weights."""

    def __init__(self, class_count: int) -> None:
        super().__init__(class_count, max_depth=1)
