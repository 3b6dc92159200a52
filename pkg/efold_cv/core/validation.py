import numpy as np
from pydantic import BaseModel, ConfigDict

from efold_cv.core.model import Dataset, TaskKind


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    invariant: str
    message: str

    def __str__(self) -> str:
        return f"{self.invariant}: {self.message}"


class ValidationResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def messages(self) -> list[str]:
        return [str(v) for v in self.violations]


def _first_non_finite(values: np.ndarray) -> tuple[int, ...] | None:
    bad = np.argwhere(~np.isfinite(values))
    if bad.size == 0:
        return None
    return tuple(int(i) for i in bad[0])


def validate_dataset(d: Dataset, e_max: int = 10) -> ValidationResult:
    """Check every dataset invariant and report all that fail.

    A dataset that passes can be split into `e_max` non-empty folds.
    """
    violations: list[Violation] = []

    def fail(invariant: str, message: str) -> None:
        violations.append(Violation(invariant=invariant, message=message))

    if d.features.ndim != 2:
        fail("shape", f"features must be a matrix, got {d.features.ndim} dimension(s)")
        return ValidationResult(violations=tuple(violations))
    if d.target.ndim != 1:
        fail("shape", f"target must be a vector, got {d.target.ndim} dimension(s)")
        return ValidationResult(violations=tuple(violations))

    rows, columns = d.features.shape
    if rows != d.target.shape[0]:
        fail(
            "row_count",
            f"features have {rows} rows but target has {d.target.shape[0]} values",
        )
    if d.target.shape[0] < e_max:
        fail(
            "min_instances",
            f"fewer instances than e_max ({d.target.shape[0]} < {e_max})",
        )
    if d.feature_names and len(d.feature_names) != columns:
        fail(
            "feature_names",
            f"{len(d.feature_names)} feature names for {columns} columns",
        )

    cell = _first_non_finite(d.features)
    if cell is not None:
        fail("finite_features", f"non-finite feature at row {cell[0]}, column {cell[1]}")

    target_is_float = d.target.dtype.kind == "f"
    if target_is_float:
        cell = _first_non_finite(d.target)
        if cell is not None:
            fail("finite_target", f"non-finite target at row {cell[0]}")

    if d.task is TaskKind.REGRESSION:
        if d.class_count is not None:
            fail("class_count", "regression datasets have no class_count")
        return ValidationResult(violations=tuple(violations))

    if d.class_count is None:
        fail("class_count", f"{d.task} dataset without class_count")
        return ValidationResult(violations=tuple(violations))
    if d.task is TaskKind.BINARY and d.class_count != 2:
        fail("class_count", f"binary task requires class_count == 2, got {d.class_count}")
    if d.task is TaskKind.MULTICLASS and d.class_count < 3:
        fail(
            "class_count",
            f"multiclass task requires class_count >= 3, got {d.class_count}",
        )
    if target_is_float:
        fail("integer_labels", "classification labels must be integers")
        return ValidationResult(violations=tuple(violations))

    out_of_range = np.flatnonzero((d.target < 0) | (d.target >= d.class_count))
    if out_of_range.size:
        row = int(out_of_range[0])
        fail(
            "label_range",
            f"label {int(d.target[row])} at row {row} outside 0..{d.class_count - 1}",
        )
    counts = np.bincount(d.target[(d.target >= 0)], minlength=d.class_count)
    for label in range(d.class_count):
        if counts[label] == 0:
            fail("label_coverage", f"label {label} absent")

    return ValidationResult(violations=tuple(violations))
