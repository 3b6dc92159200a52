"""Seeded partition of a dataset into e_max folds.

The generator is numpy's PCG64, seeded directly with the 64-bit run seed, so
a (dataset order, e_max, seed) triple always yields the same assignment on
every platform.

Stratified assignment: draw a fold offset ``o`` in ``[0, e_max)``, then walk
the classes in ascending label order, permute each class's row indices and
deal them at global positions ``o, o + 1, ...`` with ``fold = position mod
e_max``. Dealing continues across classes, which keeps the overall fold sizes
within one of each other as well as the per-class counts. A class smaller
than e_max lands on distinct consecutive folds starting wherever the previous
class stopped.
"""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from efold_cv.core.errors import IncompatibleTaskError, InsufficientInstancesError
from efold_cv.core.model import Dataset, DatasetView
from efold_cv.utils.typing import IndexArray, IntArray

logger = logging.getLogger(__name__)


class FoldAssignment(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    fold_of: np.ndarray
    e_max: int
    seed: int
    stratified: bool
    warnings: tuple[str, ...] = ()

    def fold_sizes(self) -> IntArray:
        return np.bincount(self.fold_of, minlength=self.e_max)

    def validation_indices(self, e: int) -> IndexArray:
        """Row indices of fold `e` (1-based), in dataset order."""
        _check_fold(e, self.e_max)
        return np.flatnonzero(self.fold_of == e - 1)

    def train_indices(self, e: int) -> IndexArray:
        _check_fold(e, self.e_max)
        return np.flatnonzero(self.fold_of != e - 1)


def _check_fold(e: int, e_max: int) -> None:
    if not 1 <= e <= e_max:
        raise ValueError(f"fold e={e} outside 1..{e_max}")


def _generator(seed: int) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def _frozen(fold_of: IntArray) -> IntArray:
    fold_of.setflags(write=False)
    return fold_of


def stratified_kfold(d: Dataset, e_max: int, seed: int) -> FoldAssignment:
    if not d.task.is_classification:
        raise IncompatibleTaskError(
            f"stratified_kfold needs a classification dataset, got {d.task}"
        )
    n = d.n_rows
    if n < e_max:
        raise InsufficientInstancesError(n, e_max)

    rng = _generator(seed)
    position = int(rng.integers(e_max))
    fold_of = np.full(n, -1, dtype=np.int64)
    warnings: list[str] = []
    labels = np.unique(d.target)
    for label in labels:
        members = rng.permutation(np.flatnonzero(d.target == label))
        if members.size < e_max:
            message = (
                f"class {int(label)} has {members.size} instances for {e_max} folds; "
                "some folds will not contain it"
            )
            logger.warning("Dataset name=%s: %s", d.name, message)
            warnings.append(message)
        fold_of[members] = (position + np.arange(members.size)) % e_max
        position += members.size

    return FoldAssignment(
        fold_of=_frozen(fold_of),
        e_max=e_max,
        seed=seed,
        stratified=True,
        warnings=tuple(warnings),
    )


def plain_kfold(d: Dataset, e_max: int, seed: int) -> FoldAssignment:
    n = d.n_rows
    if n < e_max:
        raise InsufficientInstancesError(n, e_max)
    order = _generator(seed).permutation(n)
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[order] = np.arange(n) % e_max
    return FoldAssignment(
        fold_of=_frozen(fold_of), e_max=e_max, seed=seed, stratified=False
    )


def assign_folds(d: Dataset, e_max: int, seed: int) -> FoldAssignment:
    """Stratified folds for classification, shuffled plain folds for regression."""
    if d.task.is_classification:
        return stratified_kfold(d, e_max, seed)
    return plain_kfold(d, e_max, seed)


def train_validation_split(
    d: Dataset, a: FoldAssignment, e: int
) -> tuple[DatasetView, DatasetView]:
    """Train on every fold but `e`, validate on fold `e` (1-based)."""
    if a.fold_of.shape[0] != d.n_rows:
        raise ValueError(
            f"fold assignment covers {a.fold_of.shape[0]} rows, dataset has {d.n_rows}"
        )
    return d.view(a.train_indices(e)), d.view(a.validation_indices(e))
