import numpy as np
import pytest

from efold_cv.core.model import Dataset, MetricKind, ScoreDirection, TaskKind


def test_arrays_are_copied_and_frozen() -> None:
    features = np.zeros((4, 2))
    d = Dataset(
        name="d",
        features=features,
        target=[0, 1, 0, 1],
        task=TaskKind.BINARY,
        class_count=2,
    )
    features[0, 0] = 5.0
    assert d.features[0, 0] == 0.0
    with pytest.raises(ValueError):
        d.features[0, 0] = 1.0
    assert d.target.dtype == np.int64
    assert d.feature_names == ("x0", "x1")


def test_integral_float_labels_become_integers() -> None:
    d = Dataset(
        name="d",
        features=np.zeros((3, 1)),
        target=np.array([0.0, 2.0, 1.0]),
        task=TaskKind.MULTICLASS,
        class_count=3,
    )
    assert d.target.dtype == np.int64


def test_view_selects_rows_in_order() -> None:
    d = Dataset(
        name="d",
        features=np.arange(10.0).reshape(5, 2),
        target=np.arange(5.0),
        task=TaskKind.REGRESSION,
    )
    view = d.view(np.array([3, 1]))
    assert view.n_rows == 2
    assert view.features.tolist() == [[6.0, 7.0], [2.0, 3.0]]
    assert view.target.tolist() == [3.0, 1.0]
    assert not view.features.flags.writeable


@pytest.mark.parametrize(
    ("task", "metric", "direction"),
    [
        (TaskKind.BINARY, MetricKind.F1_BINARY, ScoreDirection.HIGHER_IS_BETTER),
        (TaskKind.MULTICLASS, MetricKind.F1_WEIGHTED, ScoreDirection.HIGHER_IS_BETTER),
        (TaskKind.REGRESSION, MetricKind.MAE, ScoreDirection.LOWER_IS_BETTER),
    ],
)
def test_task_metric(task: TaskKind, metric: MetricKind, direction: ScoreDirection) -> None:
    assert task.metric is metric
    assert task.score_direction is direction
