import math
from pathlib import Path

import numpy as np
import pytest

from efold_cv.components.ingest.ingest_component import IngestComponent
from efold_cv.components.ingest.model import BundledSource
from efold_cv.components.learners import learner_component
from efold_cv.components.learners.model import LearnerKind, LearnerSpec, is_compatible
from efold_cv.controller.stopping import StopStatus
from efold_cv.core.errors import LearnerFitError
from efold_cv.core.model import Dataset, EfoldConfig, MetricKind
from efold_cv.harness.evaluation import confidence_interval, evaluate_run, pct_difference
from efold_cv.harness.model import RunMode
from efold_cv.metrics.scores import Score
from tests.fixtures.mock_injector import MockInjector


def test_confidence_interval_uses_the_standard_error() -> None:
    # ten scores with mean 0.9 and sample deviation 0.02
    offset = 0.02 * math.sqrt(0.9)
    scores = [0.9 + offset] * 5 + [0.9 - offset] * 5
    low, high = confidence_interval(scores)
    assert low == pytest.approx(0.88569, abs=1e-4)
    assert high == pytest.approx(0.91431, abs=1e-4)


def test_confidence_interval_with_raw_deviation_is_wider() -> None:
    scores = [0.8, 0.9, 0.85, 0.95, 0.9]
    narrow = confidence_interval(scores)
    wide = confidence_interval(scores, standard_error=False)
    assert wide[0] < narrow[0] < narrow[1] < wide[1]


def test_confidence_interval_needs_two_scores() -> None:
    with pytest.raises(ValueError, match="at least 2"):
        confidence_interval([0.5])


@pytest.mark.parametrize("value", [0.9350724237877682, 0.8631789223498866, 0.9, 0.123])
def test_constant_trace_has_a_degenerate_interval_containing_its_mean(value: float) -> None:
    assert confidence_interval([value] * 10) == (value, value)


@pytest.mark.parametrize("value", [0.9350724237877682, 0.8631789223498866])
def test_constant_fold_scores_are_within_their_interval(
    blobs: Dataset, value: float, monkeypatch: pytest.MonkeyPatch
) -> None:
    monkeypatch.setattr(
        "efold_cv.harness.evaluation.score_for_task",
        lambda *args: Score(value=value, metric=MetricKind.F1_WEIGHTED),
    )
    record = evaluate_run(blobs, LearnerSpec(kind=LearnerKind.GAUSSIAN_NB), EfoldConfig(), 2)
    assert record.stop_fold == 4
    assert record.m_e == record.m_full == value
    assert (record.ci_low, record.ci_high) == (value, value)
    assert record.within_ci is True
    assert record.pct_diff == 0.0


def test_pct_difference() -> None:
    assert pct_difference(0.88, 0.9) == pytest.approx(2.2222, abs=1e-4)
    assert pct_difference(1.1, 1.0) == pytest.approx(10.0)
    assert pct_difference(-2.0, -2.5) == pytest.approx(20.0)
    assert pct_difference(0.3, 0.0) is None


def test_simulate_run_fills_the_ground_truth(blobs: Dataset) -> None:
    config = EfoldConfig()
    record = evaluate_run(blobs, LearnerSpec(kind=LearnerKind.GAUSSIAN_NB), config, seed=11)
    assert not record.failed
    assert len(record.fold_scores) == config.e_max
    assert len(record.per_fold_wall_time) == config.e_max
    assert record.m_full == pytest.approx(sum(record.fold_scores) / config.e_max)
    assert record.stop_fold is not None and 4 <= record.stop_fold <= config.e_max
    assert record.saved_folds == config.e_max - record.stop_fold
    assert record.m_e == pytest.approx(
        sum(record.fold_scores[: record.stop_fold]) / record.stop_fold
    )
    assert record.ci_low is not None and record.ci_high is not None
    assert record.within_ci == (record.ci_low <= record.m_e <= record.ci_high)


def test_early_stop_agrees_with_simulation(linear_data: Dataset) -> None:
    spec = LearnerSpec(kind=LearnerKind.RIDGE)
    config = EfoldConfig()
    simulated = evaluate_run(linear_data, spec, config, seed=5)
    early = evaluate_run(linear_data, spec, config, seed=5, mode=RunMode.EARLY_STOP)
    assert early.stop_fold == simulated.stop_fold
    assert early.status == simulated.status
    assert early.m_e == simulated.m_e
    assert early.fold_scores == simulated.fold_scores[: early.stop_fold]
    assert early.m_full is None
    assert early.within_ci is None


BUNDLED = ["iris_like", "wine_like", "cancer_like", "student_like", "era_like"]


def test_early_stop_agrees_with_simulation_on_bundled_data(injector: MockInjector) -> None:
    ingest = injector.get(IngestComponent)
    datasets = {
        name: ingest.load(BundledSource(bundled=name), Path.cwd()) for name in BUNDLED
    }
    rng = np.random.Generator(np.random.PCG64(50))
    config = EfoldConfig()
    for _ in range(50):
        d = datasets[BUNDLED[int(rng.integers(len(BUNDLED)))]]
        kinds = [k for k in LearnerKind if is_compatible(k, d.task)]
        spec = LearnerSpec(kind=kinds[int(rng.integers(len(kinds)))])
        seed = int(rng.integers(2**32))
        simulated = evaluate_run(d, spec, config, seed)
        early = evaluate_run(d, spec, config, seed, mode=RunMode.EARLY_STOP)
        assert (early.stop_fold, early.m_e) == (simulated.stop_fold, simulated.m_e), (
            d.name,
            spec.kind,
            seed,
        )


def test_same_seed_gives_the_same_scores(blobs: Dataset) -> None:
    spec = LearnerSpec(kind=LearnerKind.KNN_CLASSIFIER)
    first = evaluate_run(blobs, spec, EfoldConfig(), seed=3)
    second = evaluate_run(blobs, spec, EfoldConfig(), seed=3)
    assert first.fold_scores == second.fold_scores


def test_identity_fields_are_recorded(blobs: Dataset) -> None:
    record = evaluate_run(
        blobs,
        LearnerSpec(kind=LearnerKind.GAUSSIAN_NB),
        EfoldConfig(e_max=5),
        seed=9,
        combination=4,
        run=2,
    )
    assert (record.combination, record.run, record.seed, record.e_max) == (4, 2, 9, 5)
    assert record.dataset == blobs.name
    assert record.learner is LearnerKind.GAUSSIAN_NB
    assert record.status in {StopStatus.STOPPED_EARLY, StopStatus.EXHAUSTED_FOLDS}


def test_failing_fold_yields_a_failed_record(
    blobs: Dataset, monkeypatch: pytest.MonkeyPatch
) -> None:
    calls = {"n": 0}

    def flaky_fit(spec, train):
        calls["n"] += 1
        if calls["n"] == 3:
            raise LearnerFitError("singular matrix")
        return learner_component.fit(spec, train)

    monkeypatch.setattr("efold_cv.harness.evaluation.fit", flaky_fit)
    record = evaluate_run(blobs, LearnerSpec(kind=LearnerKind.GAUSSIAN_NB), EfoldConfig(), 1)
    assert record.failed
    assert record.failed_fold == 3
    assert len(record.fold_scores) == 2
    assert record.error == "LearnerFitError: singular matrix"
    assert record.stop_fold is None
