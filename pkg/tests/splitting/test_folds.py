from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from efold_cv.components.ingest.ingest_component import IngestComponent
from efold_cv.components.ingest.model import BundledSource
from efold_cv.core.errors import IncompatibleTaskError, InsufficientInstancesError
from efold_cv.core.model import Dataset, TaskKind
from efold_cv.splitting.folds import (
    assign_folds,
    plain_kfold,
    stratified_kfold,
    train_validation_split,
)
from tests.fixtures.datasets import labelled_dataset
from tests.fixtures.mock_injector import MockInjector


def _regression(n: int) -> Dataset:
    return Dataset(
        name="r",
        features=np.arange(n, dtype=np.float64).reshape(-1, 1),
        target=np.arange(n, dtype=np.float64),
        task=TaskKind.REGRESSION,
    )


def test_fold_sizes_of_150_rows() -> None:
    d = labelled_dataset([0] * 50 + [1] * 50 + [2] * 50)
    a = stratified_kfold(d, 10, seed=42)
    assert a.fold_sizes().tolist() == [15] * 10
    for label in range(3):
        per_fold = np.bincount(a.fold_of[d.target == label], minlength=10)
        assert set(per_fold.tolist()) == {5}


def test_103_rows_give_sizes_10_and_11() -> None:
    d = labelled_dataset([i % 3 for i in range(103)])
    sizes = stratified_kfold(d, 10, seed=7).fold_sizes()
    assert sorted(sizes.tolist()) == [10] * 7 + [11] * 3


def test_small_class_lands_on_distinct_folds_and_warns() -> None:
    d = labelled_dataset([0] * 97 + [1] * 3)
    a = stratified_kfold(d, 10, seed=1)
    minority_folds = a.fold_of[d.target == 1]
    assert len(set(minority_folds.tolist())) == 3
    assert len(a.warnings) == 1
    assert "class 1 has 3 instances" in a.warnings[0]


def test_too_few_instances_are_rejected() -> None:
    with pytest.raises(InsufficientInstancesError, match="insufficient instances"):
        stratified_kfold(labelled_dataset([0, 1, 2] * 3), 10, seed=0)
    with pytest.raises(InsufficientInstancesError):
        plain_kfold(_regression(9), 10, seed=0)


def test_stratified_needs_classification() -> None:
    with pytest.raises(IncompatibleTaskError):
        stratified_kfold(_regression(20), 10, seed=0)


def test_assignment_is_a_pure_function_of_the_seed() -> None:
    d = labelled_dataset([i % 4 for i in range(80)])
    first = stratified_kfold(d, 10, seed=123).fold_of
    again = stratified_kfold(d, 10, seed=123).fold_of
    other = stratified_kfold(d, 10, seed=124).fold_of
    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)


def test_assign_folds_dispatches_on_task() -> None:
    assert assign_folds(labelled_dataset([0, 1, 2] * 10), 10, seed=0).stratified
    assert not assign_folds(_regression(30), 10, seed=0).stratified


def test_seed_must_fit_in_64_bits() -> None:
    with pytest.raises(ValueError):
        plain_kfold(_regression(20), 10, seed=2**64)


def test_train_and_validation_views_partition_the_rows() -> None:
    d = _regression(25)
    a = plain_kfold(d, 5, seed=9)
    seen: list[float] = []
    for e in range(1, 6):
        train, validation = train_validation_split(d, a, e)
        assert train.n_rows + validation.n_rows == 25
        assert not set(train.target.tolist()) & set(validation.target.tolist())
        seen.extend(validation.target.tolist())
    assert sorted(seen) == [float(i) for i in range(25)]


def test_fold_index_is_one_based() -> None:
    d = _regression(20)
    a = plain_kfold(d, 10, seed=0)
    with pytest.raises(ValueError):
        a.validation_indices(0)
    with pytest.raises(ValueError):
        a.validation_indices(11)


@settings(max_examples=60, deadline=None)
@given(
    class_sizes=st.lists(st.integers(min_value=1, max_value=40), min_size=2, max_size=5),
    e_max=st.integers(min_value=4, max_value=12),
    seed=st.integers(min_value=0, max_value=2**64 - 1),
)
def test_stratified_partition_properties(
    class_sizes: list[int], e_max: int, seed: int
) -> None:
    labels = [label for label, size in enumerate(class_sizes) for _ in range(size)]
    if len(labels) < e_max:
        return
    d = labelled_dataset(labels)
    a = stratified_kfold(d, e_max, seed)

    assert a.fold_of.shape == (len(labels),)
    assert a.fold_of.min() >= 0
    assert a.fold_of.max() < e_max
    sizes = a.fold_sizes()
    assert sizes.max() - sizes.min() <= 1
    assert sizes.min() >= 1
    for label in range(len(class_sizes)):
        per_fold = np.bincount(a.fold_of[d.target == label], minlength=e_max)
        assert per_fold.max() - per_fold.min() <= 1


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(min_value=4, max_value=200),
    e_max=st.integers(min_value=4, max_value=10),
    seed=st.integers(min_value=0, max_value=2**32),
)
def test_plain_partition_properties(n: int, e_max: int, seed: int) -> None:
    if n < e_max:
        return
    sizes = plain_kfold(_regression(n), e_max, seed).fold_sizes()
    assert sizes.sum() == n
    assert sizes.max() - sizes.min() <= 1


@pytest.mark.parametrize("name", ["iris_like", "wine_like", "cancer_like", "student_like"])
def test_bundled_classification_folds_are_stratified(
    injector: MockInjector, name: str
) -> None:
    d = injector.get(IngestComponent).load(BundledSource(bundled=name), Path.cwd())
    labels = np.unique(d.target)
    for seed in range(100):
        a = assign_folds(d, 10, seed)
        assert a.stratified
        sizes = a.fold_sizes()
        assert sizes.sum() == d.n_rows
        assert sizes.max() - sizes.min() <= 1
        for label in labels:
            per_fold = np.bincount(a.fold_of[d.target == label], minlength=10)
            assert per_fold.max() - per_fold.min() <= 1
