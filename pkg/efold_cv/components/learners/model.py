from enum import StrEnum
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from efold_cv.core.model import TaskKind


class LearnerKind(StrEnum):
    ADABOOST = "adaboost"
    DECISION_TREE_CLASSIFIER = "decision_tree_classifier"
    GAUSSIAN_NB = "gaussian_nb"
    KNN_CLASSIFIER = "knn_classifier"
    LOGISTIC_REGRESSION = "logistic_regression"
    DECISION_TREE_REGRESSOR = "decision_tree_regressor"
    KNN_REGRESSOR = "knn_regressor"
    LASSO = "lasso"
    LINEAR_REGRESSION = "linear_regression"
    RIDGE = "ridge"

    @property
    def is_classifier(self) -> bool:
        return self in _CLASSIFIERS

    @property
    def task_family(self) -> Literal["classification", "regression"]:
        return "classification" if self.is_classifier else "regression"


_CLASSIFIERS = frozenset(
    {
        LearnerKind.ADABOOST,
        LearnerKind.DECISION_TREE_CLASSIFIER,
        LearnerKind.GAUSSIAN_NB,
        LearnerKind.KNN_CLASSIFIER,
        LearnerKind.LOGISTIC_REGRESSION,
    }
)

# Fixed defaults. Keys not listed here are rejected.
DEFAULT_HYPERPARAMETERS: dict[LearnerKind, dict[str, Any]] = {
    LearnerKind.ADABOOST: {"n_rounds": 50, "learning_rate": 1.0},
    LearnerKind.DECISION_TREE_CLASSIFIER: {"min_samples_split": 2},
    LearnerKind.GAUSSIAN_NB: {"var_smoothing": 1e-9},
    LearnerKind.KNN_CLASSIFIER: {"k": 5},
    LearnerKind.LOGISTIC_REGRESSION: {
        "regularization": 1.0,
        "max_iter": 1000,
        "tol": 1e-6,
    },
    LearnerKind.DECISION_TREE_REGRESSOR: {"min_samples_split": 2},
    LearnerKind.KNN_REGRESSOR: {"k": 5},
    LearnerKind.LASSO: {"alpha": 1.0, "tol": 1e-4, "max_sweeps": 1000},
    LearnerKind.LINEAR_REGRESSION: {},
    LearnerKind.RIDGE: {"alpha": 1.0},
}


def is_compatible(kind: LearnerKind, task: TaskKind) -> bool:
    return kind.is_classifier == task.is_classification


class LearnerSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: LearnerKind
    hyperparameters: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _known_hyperparameters(self) -> "LearnerSpec":
        unknown = set(self.hyperparameters) - set(DEFAULT_HYPERPARAMETERS[self.kind])
        if unknown:
            raise ValueError(
                f"unknown hyperparameters for {self.kind}: {sorted(unknown)}"
            )
        return self

    def resolved(self) -> dict[str, Any]:
        return {**DEFAULT_HYPERPARAMETERS[self.kind], **self.hyperparameters}


class FittedModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: LearnerKind
    parameters: Any = Field(description="The fitted estimator; opaque to callers.")
    training_size: int
    n_features: int
    class_count: int | None = None
    fallback: str | None = Field(
        None, description="Set when degenerate training data forced a fallback model."
    )

    def predict(self, rows: np.ndarray) -> np.ndarray:
        from efold_cv.components.learners.learner_component import predict

        return predict(self, rows)
