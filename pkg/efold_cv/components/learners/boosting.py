import logging
import math
from typing import Self

import numpy as np

from efold_cv.components.learners.base import (
    Classifier,
    Vector,
    argmax_lowest,
)
from efold_cv.components.learners.tree import DecisionStump
from efold_cv.utils.typing import FloatArray

logger = logging.getLogger(__name__)


class AdaBoostSAMME(Classifier):
    """Discrete multiclass AdaBoost (SAMME) over decision stumps.

    Boosting ends early when a stump is perfect on the weighted data, or when
    its weighted error is no better than chance (``1 - 1 / C``). A first stump
    that is already too weak is kept on its own so the model can still
    predict.
    """

    def __init__(
        self, class_count: int, n_rounds: int = 50, learning_rate: float = 1.0
    ) -> None:
        super().__init__(class_count)
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate

    def fit(self, X: FloatArray, y: Vector) -> Self:
        y = np.asarray(y, dtype=np.int64)
        n = y.shape[0]
        weights = np.full(n, 1.0 / n)
        chance_error = 1.0 - 1.0 / self.class_count
        self.stumps_: list[DecisionStump] = []
        self.alphas_: list[float] = []
        for round_ in range(self.n_rounds):
            stump = DecisionStump(self.class_count).fit(X, y, sample_weight=weights)
            missed = stump.predict(X) != y
            error = float(weights[missed].sum() / weights.sum())
            if error <= 0.0:
                self._keep(stump, 1.0)
                break
            if error >= chance_error:
                if not self.stumps_:
                    self._keep(stump, 1.0)
                logger.debug("Stopping boosting at round=%s error=%.4f", round_, error)
                break
            alpha = self.learning_rate * (
                math.log((1.0 - error) / error) + math.log(self.class_count - 1)
            )
            self._keep(stump, alpha)
            weights = weights * np.exp(alpha * missed)
            weights /= weights.sum()
        return self

    def _keep(self, stump: DecisionStump, alpha: float) -> None:
        self.stumps_.append(stump)
        self.alphas_.append(alpha)

    def predict(self, X: FloatArray) -> Vector:
        votes = np.zeros((X.shape[0], self.class_count))
        rows = np.arange(X.shape[0])
        for stump, alpha in zip(self.stumps_, self.alphas_, strict=True):
            votes[rows, stump.predict(X)] += alpha
        return argmax_lowest(votes)
