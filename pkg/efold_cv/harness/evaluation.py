import logging
import math
import time
from collections.abc import Sequence

from efold_cv.components.learners.learner_component import fit, predict
from efold_cv.components.learners.model import LearnerSpec
from efold_cv.controller.stopping import StopDecision, new_state, observe, run_sequence
from efold_cv.core.model import Dataset, EfoldConfig
from efold_cv.harness.model import RunMode, RunRecord
from efold_cv.metrics.scores import score_for_task
from efold_cv.metrics.statistics import running_mean, sample_std, student_t_quantile
from efold_cv.splitting.folds import assign_folds, train_validation_split

logger = logging.getLogger(__name__)


def pct_difference(m_e: float, m_full: float) -> float | None:
    """Relative gap between the early and the full mean, in percent.

    Undefined (None) when the full mean is exactly zero.
    """
    if m_full == 0.0:
        return None
    return abs(m_e - m_full) / abs(m_full) * 100.0


def confidence_interval(
    scores: Sequence[float], level: float = 0.95, standard_error: bool = True
) -> tuple[float, float]:
    """Student-t interval around the mean of the fold scores.

    With `standard_error` the half-width is t * s / sqrt(k). Without it the
    raw sample deviation is used, which gives a much wider band.
    """
    k = len(scores)
    if k < 2:
        raise ValueError(f"a confidence interval needs at least 2 scores, got {k}")
    mean = running_mean(scores)
    spread = sample_std(scores)
    if standard_error:
        spread /= math.sqrt(k)
    half_width = student_t_quantile((1.0 + level) / 2.0, k - 1) * spread
    return mean - half_width, mean + half_width


def evaluate_run(
    d: Dataset,
    spec: LearnerSpec,
    config: EfoldConfig,
    seed: int,
    mode: RunMode = RunMode.SIMULATE,
    *,
    combination: int = 0,
    run: int = 0,
    ci_level: float = 0.95,
    ci_uses_standard_error: bool = True,
) -> RunRecord:
    """Score one learner on one dataset with one fold assignment.

    In simulate mode all e_max folds are scored and the rule is replayed on
    the full trace, which also yields the ground truth. In early-stop mode
    fold scoring stops at the rule's decision. A fold whose learner raises
    produces a failed record instead of an exception.
    """
    identity = {
        "combination": combination,
        "run": run,
        "dataset": d.name,
        "learner": spec.kind,
        "task": d.task,
        "seed": seed,
        "mode": mode,
        "e_max": config.e_max,
    }
    assignment = assign_folds(d, config.e_max, seed)

    scores: list[float] = []
    timings: list[float] = []
    state = new_state(config)
    decision: StopDecision | None = None
    for e in range(1, config.e_max + 1):
        train, validation = train_validation_split(d, assignment, e)
        started = time.perf_counter()
        try:
            model = fit(spec, train)
            predictions = predict(model, validation.features)
            score = score_for_task(
                d.task, validation.target, predictions, d.class_count
            ).value
        except Exception as err:
            logger.exception(
                "Fold failed dataset=%s learner=%s seed=%s fold=%s",
                d.name,
                spec.kind,
                seed,
                e,
            )
            return RunRecord(
                **identity,
                fold_scores=scores,
                per_fold_wall_time=timings,
                failed_fold=e,
                error=f"{type(err).__name__}: {err}",
            )
        timings.append(time.perf_counter() - started)
        scores.append(score)
        if mode is RunMode.EARLY_STOP:
            state, decision = observe(state, score)
            if decision.is_terminal:
                break

    if mode is RunMode.EARLY_STOP:
        assert decision is not None
        return RunRecord(
            **identity,
            status=decision.status,
            fold_scores=scores,
            stop_fold=decision.stop_fold,
            m_e=decision.final_mean,
            saved_folds=config.e_max - decision.stop_fold,
            per_fold_wall_time=timings,
        )

    decision = run_sequence(config, scores)
    m_full = running_mean(scores)
    ci_low, ci_high = confidence_interval(scores, ci_level, ci_uses_standard_error)
    m_e = decision.final_mean
    saved = config.e_max - decision.stop_fold
    return RunRecord(
        **identity,
        status=decision.status,
        fold_scores=scores,
        stop_fold=decision.stop_fold,
        m_e=m_e,
        m_full=m_full,
        ci_low=ci_low,
        ci_high=ci_high,
        within_ci=ci_low <= m_e <= ci_high,
        pct_diff=pct_difference(m_e, m_full) if saved > 0 else None,
        saved_folds=saved,
        per_fold_wall_time=timings,
    )
