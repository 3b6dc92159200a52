"""Incremental stopping rule for e-fold cross-validation.

After each fold score the sample standard deviation of all scores so far is
recomputed. From the third fold on, the stability counter goes up when the
deviation shrinks or moves by no more than the tolerance (relative to the
previous deviation), and drops back to zero when it grows by more than that.
Evaluation stops as soon as the counter reaches the threshold, or when e_max
folds have been scored.

States are immutable: `observe` returns the next state together with the
decision.
"""

import math
from collections.abc import Sequence
from enum import StrEnum

from pydantic import BaseModel, ConfigDict

from efold_cv.core.errors import ControllerStoppedError
from efold_cv.core.model import EfoldConfig
from efold_cv.metrics.statistics import running_mean, sample_std


class StopStatus(StrEnum):
    CONTINUE = "continue"
    STOPPED_EARLY = "stopped_early"
    EXHAUSTED_FOLDS = "exhausted_folds"


class StopDecision(BaseModel):
    model_config = ConfigDict(frozen=True)

    status: StopStatus
    stop_fold: int
    final_mean: float

    @property
    def is_terminal(self) -> bool:
        return self.status is not StopStatus.CONTINUE


class TraceStep(BaseModel):
    model_config = ConfigDict(frozen=True)

    e: int
    score: float
    mean: float
    sigma: float | None
    count: int


class StoppingState(BaseModel):
    model_config = ConfigDict(frozen=True)

    config: EfoldConfig
    scores: tuple[float, ...] = ()
    sigma_curr: float | None = None
    sigma_prev: float | None = None
    count: int = 0
    decision: StopDecision | None = None
    history: tuple[TraceStep, ...] = ()

    @property
    def e(self) -> int:
        return len(self.scores)

    @property
    def mean(self) -> float | None:
        return running_mean(self.scores) if self.scores else None

    @property
    def is_terminal(self) -> bool:
        return self.decision is not None and self.decision.is_terminal


def new_state(config: EfoldConfig | None = None) -> StoppingState:
    return StoppingState(config=config or EfoldConfig())


def _next_count(
    count: int, sigma_curr: float, sigma_prev: float, tolerance: float
) -> int:
    if sigma_curr < sigma_prev:
        return count + 1
    if abs(sigma_curr - sigma_prev) > tolerance * sigma_prev:
        return 0
    return count + 1


def observe(state: StoppingState, score: float) -> tuple[StoppingState, StopDecision]:
    if state.is_terminal:
        raise ControllerStoppedError()
    score = float(score)
    if not math.isfinite(score):
        raise ValueError(f"fold score must be finite, got {score}")

    config = state.config
    scores = (*state.scores, score)
    e = len(scores)
    sigma_prev = state.sigma_curr
    sigma_curr = sample_std(scores) if e >= 2 else None
    count = state.count
    if e > 2:
        assert sigma_curr is not None and sigma_prev is not None
        count = _next_count(count, sigma_curr, sigma_prev, config.stability_tolerance)

    mean = running_mean(scores)
    if count == config.count_threshold:
        status = StopStatus.STOPPED_EARLY
    elif e == config.e_max:
        status = StopStatus.EXHAUSTED_FOLDS
    else:
        status = StopStatus.CONTINUE
    decision = StopDecision(status=status, stop_fold=e, final_mean=mean)

    step = TraceStep(e=e, score=score, mean=mean, sigma=sigma_curr, count=count)
    next_state = state.model_copy(
        update={
            "scores": scores,
            "sigma_curr": sigma_curr,
            "sigma_prev": sigma_prev,
            "count": count,
            "decision": decision,
            "history": (*state.history, step),
        }
    )
    return next_state, decision


def run_sequence(config: EfoldConfig, scores: Sequence[float]) -> StopDecision:
    """Replay a full pre-computed trace of e_max scores through the rule.

    Scores after the stop point are ignored.
    """
    if len(scores) != config.e_max:
        raise ValueError(f"expected {config.e_max} scores, got {len(scores)}")
    if not all(math.isfinite(s) for s in scores):
        raise ValueError("fold scores must be finite")
    state = new_state(config)
    for score in scores:
        state, decision = observe(state, score)
        if decision.is_terminal:
            return decision
    raise AssertionError("the rule always terminates by e_max")
