import math
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from efold_cv.core.model import MetricKind, TaskKind
from efold_cv.utils.typing import AnyArray


class Score(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    metric: MetricKind

    @model_validator(mode="after")
    def _check_range(self) -> "Score":
        if not math.isfinite(self.value):
            raise ValueError(f"{self.metric} score must be finite, got {self.value}")
        if self.metric is MetricKind.MAE and self.value < 0:
            raise ValueError(f"MAE cannot be negative, got {self.value}")
        if self.metric is not MetricKind.MAE and not 0.0 <= self.value <= 1.0:
            raise ValueError(f"{self.metric} must lie in [0, 1], got {self.value}")
        return self


def _paired(y_true: Any, y_pred: Any) -> tuple[AnyArray, AnyArray]:
    t = np.asarray(y_true)
    p = np.asarray(y_pred)
    if t.shape != p.shape or t.ndim != 1:
        raise ValueError(
            f"y_true and y_pred must be vectors of equal length, got {t.shape} and {p.shape}"
        )
    if t.size == 0:
        raise ValueError("cannot score an empty prediction")
    return t, p


def _one_vs_rest_f1(
    y_true: AnyArray, y_pred: AnyArray, label: int
) -> float:
    # 0 when the class is neither present nor predicted
    tp = int(np.count_nonzero((y_true == label) & (y_pred == label)))
    fp = int(np.count_nonzero((y_true != label) & (y_pred == label)))
    fn = int(np.count_nonzero((y_true == label) & (y_pred != label)))
    denominator = 2 * tp + fp + fn
    if denominator == 0:
        return 0.0
    return 2 * tp / denominator


def f1_binary(y_true: Any, y_pred: Any, positive_label: int = 1) -> Score:
    t, p = _paired(y_true, y_pred)
    return Score(value=_one_vs_rest_f1(t, p, positive_label), metric=MetricKind.F1_BINARY)


def f1_weighted(y_true: Any, y_pred: Any, class_count: int) -> Score:
    """Support-weighted mean of the one-vs-rest F1 of every class."""
    t, p = _paired(y_true, y_pred)
    support = np.bincount(t.astype(np.int64), minlength=class_count)
    total = 0.0
    for label in range(class_count):
        if support[label]:
            total += support[label] * _one_vs_rest_f1(t, p, label)
    # clamp the last-ulp overshoot of a perfect score
    return Score(value=min(total / t.size, 1.0), metric=MetricKind.F1_WEIGHTED)


def mae(y_true: Any, y_pred: Any) -> Score:
    t, p = _paired(y_true, y_pred)
    t = t.astype(np.float64)
    p = p.astype(np.float64)
    if not (np.isfinite(t).all() and np.isfinite(p).all()):
        raise ValueError("MAE needs finite truths and predictions")
    return Score(value=math.fsum(np.abs(t - p)) / t.size, metric=MetricKind.MAE)


def score_for_task(
    task: TaskKind, y_true: Any, y_pred: Any, class_count: int | None = None
) -> Score:
    """Score with the metric the task kind prescribes."""
    match task:
        case TaskKind.BINARY:
            return f1_binary(y_true, y_pred)
        case TaskKind.MULTICLASS:
            if class_count is None:
                raise ValueError("weighted F1 needs the class count")
            return f1_weighted(y_true, y_pred, class_count)
        case TaskKind.REGRESSION:
            return mae(y_true, y_pred)
