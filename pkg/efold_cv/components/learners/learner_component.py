import logging

import numpy as np

from efold_cv.components.learners.base import ConstantClassifier, Estimator
from efold_cv.components.learners.boosting import AdaBoostSAMME
from efold_cv.components.learners.linear import Lasso, LinearRegression, Ridge
from efold_cv.components.learners.logistic import LogisticRegression
from efold_cv.components.learners.model import (
    FittedModel,
    LearnerKind,
    LearnerSpec,
    is_compatible,
)
from efold_cv.components.learners.naive_bayes import GaussianNB
from efold_cv.components.learners.neighbors import KNNClassifier, KNNRegressor
from efold_cv.components.learners.tree import (
    DecisionTreeClassifier,
    DecisionTreeRegressor,
)
from efold_cv.core.errors import IncompatibleTaskError, LearnerFitError
from efold_cv.core.model import DatasetView

logger = logging.getLogger(__name__)


def build_estimator(spec: LearnerSpec, class_count: int | None) -> Estimator:
    params = spec.resolved()
    if spec.kind.is_classifier and class_count is None:
        raise IncompatibleTaskError(f"{spec.kind} needs a classification dataset")
    match spec.kind:
        case LearnerKind.ADABOOST:
            assert class_count is not None
            return AdaBoostSAMME(
                class_count,
                n_rounds=int(params["n_rounds"]),
                learning_rate=float(params["learning_rate"]),
            )
        case LearnerKind.DECISION_TREE_CLASSIFIER:
            assert class_count is not None
            return DecisionTreeClassifier(
                class_count, min_samples_split=int(params["min_samples_split"])
            )
        case LearnerKind.GAUSSIAN_NB:
            assert class_count is not None
            return GaussianNB(class_count, var_smoothing=float(params["var_smoothing"]))
        case LearnerKind.KNN_CLASSIFIER:
            assert class_count is not None
            return KNNClassifier(class_count, k=int(params["k"]))
        case LearnerKind.LOGISTIC_REGRESSION:
            assert class_count is not None
            return LogisticRegression(
                class_count,
                regularization=float(params["regularization"]),
                max_iter=int(params["max_iter"]),
                tol=float(params["tol"]),
            )
        case LearnerKind.DECISION_TREE_REGRESSOR:
            return DecisionTreeRegressor(min_samples_split=int(params["min_samples_split"]))
        case LearnerKind.KNN_REGRESSOR:
            return KNNRegressor(k=int(params["k"]))
        case LearnerKind.LASSO:
            return Lasso(
                alpha=float(params["alpha"]),
                tol=float(params["tol"]),
                max_sweeps=int(params["max_sweeps"]),
            )
        case LearnerKind.LINEAR_REGRESSION:
            return LinearRegression()
        case LearnerKind.RIDGE:
            return Ridge(alpha=float(params["alpha"]))


def fit(spec: LearnerSpec, train: DatasetView) -> FittedModel:
    """Fit `spec` on a training view.

    Degenerate data never crashes: a classifier that sees a single class
    becomes a constant classifier.
    """
    if not is_compatible(spec.kind, train.task):
        raise IncompatibleTaskError(f"{spec.kind} cannot be trained on a {train.task} task")
    if train.n_rows == 0:
        raise LearnerFitError(f"{spec.kind} cannot be fit on an empty training set")

    fallback = None
    estimator = build_estimator(spec, train.class_count)
    if spec.kind.is_classifier and np.unique(train.target).size == 1:
        assert train.class_count is not None
        fallback = "single-class training data, constant classifier"
        logger.debug("Learner kind=%s falls back: %s", spec.kind, fallback)
        estimator = ConstantClassifier(train.class_count)

    try:
        estimator.fit(np.asarray(train.features), np.asarray(train.target))
    except (np.linalg.LinAlgError, FloatingPointError, ValueError) as e:
        raise LearnerFitError(f"{spec.kind} failed to fit: {e}") from e

    return FittedModel(
        kind=spec.kind,
        parameters=estimator,
        training_size=train.n_rows,
        n_features=train.n_features,
        class_count=train.class_count,
        fallback=fallback,
    )


def predict(m: FittedModel, rows: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != m.n_features:
        raise ValueError(
            f"{m.kind} was trained on {m.n_features} columns, got rows of shape {rows.shape}"
        )
    predictions = m.parameters.predict(rows)
    if not m.kind.is_classifier and not np.isfinite(predictions).all():
        raise LearnerFitError(f"{m.kind} produced non-finite predictions")
    return predictions
