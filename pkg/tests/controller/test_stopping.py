import math
import statistics
from collections.abc import Callable

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from efold_cv.controller.stopping import (
    StopStatus,
    new_state,
    observe,
    run_sequence,
)
from efold_cv.core.errors import ControllerStoppedError
from efold_cv.core.model import EfoldConfig

DEFAULT = EfoldConfig()


def oracle_stop_fold(scores: list[float], config: EfoldConfig = DEFAULT) -> int:
    """Recompute every prefix deviation from scratch and apply the rule literally."""
    count = 0
    for e in range(1, config.e_max + 1):
        if e > 2:
            current = statistics.stdev(scores[:e])
            previous = statistics.stdev(scores[: e - 1])
            if current < previous:
                count += 1
            elif abs(current - previous) > config.stability_tolerance * previous:
                count = 0
            else:
                count += 1
        if count == config.count_threshold:
            return e
    return config.e_max


def test_constant_scores_stop_at_fold_four() -> None:
    decision = run_sequence(DEFAULT, [0.9] * 10)
    assert decision.status is StopStatus.STOPPED_EARLY
    assert decision.stop_fold == 4
    assert decision.final_mean == pytest.approx(0.9)


def test_shrinking_deviation_stops_at_fold_four() -> None:
    decision = run_sequence(DEFAULT, [0.9, 0.8, 0.85, 0.85, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1])
    assert decision.stop_fold == 4
    assert decision.final_mean == pytest.approx(0.85)


def test_alternating_scores_stop_once_the_deviation_settles() -> None:
    # the deviation of 0.5, 0.9, 0.5, 0.9 equals that of 0.5, 0.9, 0.5
    decision = run_sequence(DEFAULT, [0.5, 0.9] * 5)
    assert decision.status is StopStatus.STOPPED_EARLY
    assert decision.stop_fold == 4
    assert decision.final_mean == pytest.approx(0.7)


def test_growing_deviation_exhausts_the_folds() -> None:
    scores = [3.0**i for i in range(10)]
    decision = run_sequence(DEFAULT, scores)
    assert decision.status is StopStatus.EXHAUSTED_FOLDS
    assert decision.stop_fold == 10
    assert decision.final_mean == pytest.approx(sum(scores) / 10)


def test_a_jump_resets_the_counter() -> None:
    state = new_state()
    counts = []
    for score in [0.9, 0.8, 0.85, 0.2]:
        state, _ = observe(state, score)
        counts.append(state.count)
    assert counts == [0, 0, 1, 0]


def test_observe_after_stop_is_an_error() -> None:
    state = new_state()
    for score in [0.9, 0.9, 0.9, 0.9]:
        state, decision = observe(state, score)
    assert decision.is_terminal
    with pytest.raises(ControllerStoppedError, match="controller already stopped"):
        observe(state, 0.9)


def test_non_finite_scores_are_rejected() -> None:
    with pytest.raises(ValueError):
        observe(new_state(), math.nan)


def test_states_are_immutable_snapshots() -> None:
    start = new_state()
    after, _ = observe(start, 0.5)
    assert start.scores == ()
    assert after.scores == (0.5,)
    assert after.mean == 0.5
    assert start.mean is None


def test_history_records_every_fold() -> None:
    state = new_state()
    for score in [0.7, 0.9, 0.8]:
        state, decision = observe(state, score)
    assert [step.e for step in state.history] == [1, 2, 3]
    assert state.history[0].sigma is None
    assert state.history[2].sigma == pytest.approx(0.1)
    assert decision.status is StopStatus.CONTINUE


def test_trace_of_a_short_shrinking_sequence() -> None:
    state = new_state()
    for score in [0.8, 0.9, 0.85, 0.84]:
        state, decision = observe(state, score)
    sigmas = [step.sigma for step in state.history]
    assert sigmas[0] is None
    assert sigmas[1:] == pytest.approx([0.070711, 0.05, 0.041130], abs=1e-6)
    assert [step.count for step in state.history] == [0, 0, 1, 2]
    assert decision.status is StopStatus.STOPPED_EARLY
    assert decision.stop_fold == 4
    assert decision.final_mean == pytest.approx(0.8475, abs=1e-12)


def test_run_sequence_needs_e_max_scores() -> None:
    with pytest.raises(ValueError):
        run_sequence(DEFAULT, [0.9] * 9)


def test_threshold_one_can_stop_at_fold_three() -> None:
    config = EfoldConfig(count_threshold=1)
    assert run_sequence(config, [0.9] * 10).stop_fold == 3


def test_smaller_e_max_exhausts_sooner() -> None:
    config = EfoldConfig(e_max=5)
    decision = run_sequence(config, [2.0**i for i in range(5)])
    assert decision.status is StopStatus.EXHAUSTED_FOLDS
    assert decision.stop_fold == 5


def _normal_cluster(rng: np.random.Generator) -> list[float]:
    base = rng.uniform(0.3, 0.95)
    return (base + rng.normal(0.0, rng.uniform(0.001, 0.1), 10)).tolist()


def _uniform_unit(rng: np.random.Generator) -> list[float]:
    return rng.uniform(0.0, 1.0, 10).tolist()


@pytest.mark.parametrize("draw", [_normal_cluster, _uniform_unit])
def test_matches_the_oracle_on_a_thousand_random_traces(
    draw: Callable[[np.random.Generator], list[float]],
) -> None:
    rng = np.random.Generator(np.random.PCG64(2024))
    for _ in range(1000):
        scores = draw(rng)
        decision = run_sequence(DEFAULT, scores)
        assert decision.stop_fold == oracle_stop_fold(scores)
        assert decision.final_mean == pytest.approx(
            math.fsum(scores[: decision.stop_fold]) / decision.stop_fold
        )


scores_strategy = st.lists(
    st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False),
    min_size=10,
    max_size=10,
)


@settings(max_examples=300, deadline=None)
@given(scores_strategy)
def test_incremental_and_replayed_decisions_agree_with_the_oracle(
    scores: list[float],
) -> None:
    replayed = run_sequence(DEFAULT, scores)
    assert replayed.stop_fold == oracle_stop_fold(scores)

    state = new_state()
    for score in scores:
        state, decision = observe(state, score)
        if decision.is_terminal:
            break
    assert decision == replayed


@settings(max_examples=200, deadline=None)
@given(scores_strategy)
def test_default_rule_never_stops_before_fold_four(scores: list[float]) -> None:
    decision = run_sequence(DEFAULT, scores)
    assert 4 <= decision.stop_fold <= 10
    assert decision.is_terminal


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.integers(min_value=-(10**6), max_value=10**6).map(lambda i: i / 4096),
        min_size=10,
        max_size=10,
    ),
    st.integers(min_value=-30, max_value=30),
)
def test_stop_fold_is_invariant_to_power_of_two_scaling(
    scores: list[float], exponent: int
) -> None:
    factor = 2.0**exponent
    original = run_sequence(DEFAULT, scores)
    scaled = run_sequence(DEFAULT, [s * factor for s in scores])
    assert scaled.stop_fold == original.stop_fold
    assert scaled.status is original.status
