from enum import StrEnum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from efold_cv.utils.typing import AnyArray, IndexArray


class MetricKind(StrEnum):
    F1_BINARY = "f1_binary"
    F1_WEIGHTED = "f1_weighted"
    MAE = "mae"


class ScoreDirection(StrEnum):
    HIGHER_IS_BETTER = "higher_is_better"
    LOWER_IS_BETTER = "lower_is_better"


class TaskKind(StrEnum):
    BINARY = "binary"
    MULTICLASS = "multiclass"
    REGRESSION = "regression"

    @property
    def is_classification(self) -> bool:
        return self is not TaskKind.REGRESSION

    @property
    def metric(self) -> MetricKind:
        match self:
            case TaskKind.BINARY:
                return MetricKind.F1_BINARY
            case TaskKind.MULTICLASS:
                return MetricKind.F1_WEIGHTED
            case TaskKind.REGRESSION:
                return MetricKind.MAE

    @property
    def score_direction(self) -> ScoreDirection:
        if self.is_classification:
            return ScoreDirection.HIGHER_IS_BETTER
        return ScoreDirection.LOWER_IS_BETTER


class EfoldConfig(BaseModel):
    """Parameters of the stopping rule."""

    model_config = ConfigDict(frozen=True)

    e_max: int = Field(
        10,
        ge=4,
        description="Maximum number of folds. The rule cannot stop before fold 4, "
        "so smaller values are rejected.",
    )
    count_threshold: int = Field(
        2,
        ge=1,
        description="Number of consecutive stable or shrinking standard deviations "
        "needed to stop.",
    )
    stability_tolerance: float = Field(
        0.05,
        gt=0.0,
        lt=1.0,
        description="Relative change of the standard deviation, with respect to the "
        "previous one, above which the stability counter is reset.",
    )
    score_direction: ScoreDirection = Field(
        ScoreDirection.HIGHER_IS_BETTER,
        description="Only used for reporting; the stopping rule ignores it.",
    )


def _readonly(array: AnyArray) -> AnyArray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


def _coerce_target(target: Any, task: TaskKind) -> AnyArray:
    values = np.asarray(target)
    if task.is_classification and values.dtype.kind == "f":
        finite = np.isfinite(values)
        if finite.all() and np.array_equal(values, np.round(values)):
            return values.astype(np.int64)
        return values.astype(np.float64)
    if task.is_classification and values.dtype.kind in "iub":
        return values.astype(np.int64)
    return values.astype(np.float64)


class DatasetView(BaseModel):
    """Read-only subset of a dataset, used as a train or validation fold."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    features: np.ndarray
    target: np.ndarray
    task: TaskKind
    class_count: int | None = None

    @property
    def n_rows(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])


class Dataset(BaseModel):
    """Feature matrix, target vector and task kind.

    Arrays are copied and frozen on construction. Construction never checks the
    dataset invariants; use `validate_dataset` for that, so that problems come
    back as a list of violations rather than as a crash.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    features: np.ndarray
    target: np.ndarray
    task: TaskKind
    class_count: int | None = None
    feature_names: tuple[str, ...] = ()
    metadata: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def _freeze_arrays(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        task = TaskKind(data["task"])
        data["task"] = task
        data["features"] = _readonly(np.asarray(data["features"], dtype=np.float64))
        data["target"] = _readonly(_coerce_target(data["target"], task))
        if not data.get("feature_names") and data["features"].ndim == 2:
            data["feature_names"] = tuple(
                f"x{i}" for i in range(data["features"].shape[1])
            )
        return data

    @property
    def n_rows(self) -> int:
        return int(self.target.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def view(self, indices: IndexArray) -> DatasetView:
        """Rows `indices` in the given order, as an immutable view."""
        return DatasetView(
            features=_readonly(self.features[indices]),
            target=_readonly(self.target[indices]),
            task=self.task,
            class_count=self.class_count,
        )

    def as_view(self) -> DatasetView:
        return self.view(np.arange(self.n_rows))
