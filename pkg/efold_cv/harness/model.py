from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from efold_cv.components.learners.model import LearnerKind
from efold_cv.controller.stopping import StopStatus
from efold_cv.core.model import EfoldConfig, TaskKind


class RunMode(StrEnum):
    SIMULATE = "simulate"
    EARLY_STOP = "early_stop"


class RunPlan(BaseModel):
    """Everything about an experiment except which datasets and learners."""

    model_config = ConfigDict(frozen=True)

    runs_per_combination: int = Field(ge=1)
    efold: EfoldConfig = Field(default_factory=EfoldConfig)
    base_seed: int = Field(0, ge=0, lt=2**64)
    mode: RunMode = RunMode.SIMULATE
    workers: int | None = Field(
        None, ge=1, description="Process pool size, None takes it from the settings."
    )
    ci_level: float = Field(0.95, gt=0.0, lt=1.0)
    ci_uses_standard_error: bool = True


class RunRecord(BaseModel):
    """Outcome of one (dataset, learner, seed) evaluation.

    Ground-truth fields (m_full, the CI and pct_diff) are only filled in
    simulate mode. A failed run has `failed_fold` and `error` set and no
    stopping outcome.
    """

    model_config = ConfigDict(frozen=True)

    combination: int
    run: int
    dataset: str
    learner: LearnerKind
    task: TaskKind
    seed: int = Field(ge=0, lt=2**64)
    mode: RunMode
    e_max: int
    status: StopStatus | None = None
    fold_scores: list[float] = Field(default_factory=list)
    stop_fold: int | None = None
    m_e: float | None = None
    m_full: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    within_ci: bool | None = None
    pct_diff: float | None = None
    saved_folds: int | None = None
    per_fold_wall_time: list[float] = Field(default_factory=list)
    failed_fold: int | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.failed_fold is not None

    @model_validator(mode="after")
    def _consistent(self) -> "RunRecord":
        if self.failed:
            return self
        if self.stop_fold is None or self.m_e is None or self.status is None:
            raise ValueError("a completed run needs status, stop_fold and m_e")
        if self.saved_folds != self.e_max - self.stop_fold:
            raise ValueError(
                f"saved_folds={self.saved_folds} but e_max - stop_fold="
                f"{self.e_max - self.stop_fold}"
            )
        if self.stop_fold == self.e_max and self.pct_diff is not None:
            raise ValueError("pct_diff must be absent when no fold was saved")
        if self.within_ci is not None:
            if self.ci_low is None or self.ci_high is None:
                raise ValueError("within_ci without interval bounds")
            if self.within_ci != (self.ci_low <= self.m_e <= self.ci_high):
                raise ValueError("within_ci disagrees with the interval bounds")
        return self


class DistributionStats(BaseModel):
    count: int
    mean: float
    median: float
    p95: float
    max: float


class CombinationStats(BaseModel):
    combination: int
    dataset: str
    learner: LearnerKind
    task: TaskKind
    runs: int
    mean_stop_fold: float
    mean_saved_fraction: float
    within_ci_fraction: float | None = None
    pct_diff: DistributionStats | None = None


class TracePoint(BaseModel):
    """One fold of an example run, for plotting score convergence."""

    combination: int
    dataset: str
    learner: LearnerKind
    e: int
    score: float
    running_mean: float
    ci_low: float | None
    ci_high: float | None
    stop_fold: int


class AggregateReport(BaseModel):
    e_max: int
    runs: int
    failed_runs: int
    overall_mean_stop_fold: float
    mean_saved_fraction: float
    overall_within_ci_fraction: float | None
    stop_fold_histogram: dict[int, int]
    stop_fold_distribution: dict[int, float]
    within_ci_distribution: dict[int, float] = Field(
        description="Percentage of a combination's runs inside the CI -> share of "
        "combinations with that percentage."
    )
    pct_diff_by_task: dict[TaskKind, DistributionStats]
    combinations: list[CombinationStats]
    stop_fold_table: dict[str, dict[str, float]] = Field(
        description="learner -> dataset -> mean stop fold."
    )
    learner_mean_stop_fold: dict[str, float]
    dataset_mean_stop_fold: dict[str, float]
    mean_fold_wall_time: float | None = None
    saved_wall_time: float | None = Field(
        None,
        description="Mean wall time per fold times the total number of saved folds, "
        "in seconds.",
    )


class ExperimentResult(BaseModel):
    records: list[RunRecord]
    failures: list[RunRecord]
