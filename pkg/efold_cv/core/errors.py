"""Exceptions raised by the engine.

Each error subclasses the builtin it refines, so callers that only care about
`ValueError` (or `RuntimeError`, `OSError`) keep working.
"""

from typing import Any


class ConfigurationError(ValueError):
    """An experiment config, settings profile or manifest is invalid."""

    def __init__(self, message: str, field_errors: list[str] | None = None) -> None:
        super().__init__(message)
        self.field_errors = field_errors or []


class ManifestError(ConfigurationError):
    """A dataset manifest references something that does not exist."""


class DatasetValidationError(ValueError):
    def __init__(self, dataset: str, violations: list[Any]) -> None:
        self.dataset = dataset
        self.violations = violations
        listed = "; ".join(str(v) for v in violations)
        super().__init__(f"Dataset '{dataset}' is invalid: {listed}")


class InsufficientInstancesError(ValueError):
    def __init__(self, instances: int, e_max: int) -> None:
        self.instances = instances
        self.e_max = e_max
        super().__init__(
            f"insufficient instances: {instances} instances cannot fill e_max={e_max} folds"
        )


class IncompatibleTaskError(ValueError):
    """A learner was paired with a dataset of the wrong task kind."""


class CsvParseError(ValueError):
    def __init__(self, path: str, line: int, column: str, message: str) -> None:
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}:{line} column '{column}': {message}")


class ControllerStoppedError(RuntimeError):
    def __init__(self) -> None:
        super().__init__("controller already stopped")


class LearnerFitError(RuntimeError):
    """A learner could not be fit or could not predict on a fold."""


class NonFiniteValueError(CsvParseError):
    """A cell parsed as a number but is NaN or infinite."""


class RunFailedError(RuntimeError):
    """A run failed and the experiment does not tolerate failures."""

    def __init__(self, dataset: str, learner: str, seed: int, fold: int, error: str) -> None:
        self.dataset = dataset
        self.learner = learner
        self.seed = seed
        self.fold = fold
        super().__init__(
            f"run failed dataset={dataset} learner={learner} seed={seed} "
            f"fold={fold}: {error}"
        )
