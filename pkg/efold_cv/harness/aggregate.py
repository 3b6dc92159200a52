"""Summary statistics over a set of run records.

Aggregation sorts its input by (combination, run) first and sums with
`math.fsum`, so the report does not depend on the order in which workers
finished.
"""

from collections import Counter, defaultdict
from collections.abc import Iterable, Sequence

import numpy as np

from efold_cv.harness.evaluation import confidence_interval
from efold_cv.harness.model import (
    AggregateReport,
    CombinationStats,
    DistributionStats,
    RunRecord,
    TracePoint,
)
from efold_cv.metrics.statistics import running_mean

_EARLIEST_DEFAULT_STOP = 4


def _mean(values: Iterable[float]) -> float:
    return running_mean(list(values))


def distribution(values: Sequence[float]) -> DistributionStats:
    array = np.asarray(values, dtype=np.float64)
    return DistributionStats(
        count=array.size,
        mean=_mean(values),
        median=float(np.median(array)),
        p95=float(np.percentile(array, 95)),
        max=float(array.max()),
    )


def _fraction(flags: Sequence[bool]) -> float | None:
    if not flags:
        return None
    return sum(flags) / len(flags)


def _saved_fraction(mean_stop: float, e_max: int) -> float:
    return (e_max - mean_stop) / e_max


def _combination_stats(records: list[RunRecord]) -> CombinationStats:
    first = records[0]
    mean_stop = _mean(r.stop_fold for r in records if r.stop_fold is not None)
    pct = [r.pct_diff for r in records if r.pct_diff is not None]
    return CombinationStats(
        combination=first.combination,
        dataset=first.dataset,
        learner=first.learner,
        task=first.task,
        runs=len(records),
        mean_stop_fold=mean_stop,
        mean_saved_fraction=_saved_fraction(mean_stop, first.e_max),
        within_ci_fraction=_fraction(
            [r.within_ci for r in records if r.within_ci is not None]
        ),
        pct_diff=distribution(pct) if pct else None,
    )


def _within_ci_distribution(combinations: list[CombinationStats]) -> dict[int, float]:
    fractions = [c.within_ci_fraction for c in combinations]
    percents = [round(100 * f) for f in fractions if f is not None]
    if not percents:
        return {}
    counts = Counter(percents)
    return {p: counts[p] / len(percents) for p in sorted(counts)}


def aggregate(records: Sequence[RunRecord]) -> AggregateReport:
    if not records:
        raise ValueError("cannot aggregate an empty list of run records")
    ordered = sorted(records, key=lambda r: (r.combination, r.run))
    completed = [r for r in ordered if not r.failed]
    if not completed:
        raise ValueError(f"all {len(ordered)} runs failed, nothing to aggregate")
    e_maxes = {r.e_max for r in ordered}
    if len(e_maxes) != 1:
        raise ValueError(f"records mix several e_max values: {sorted(e_maxes)}")
    e_max = e_maxes.pop()

    stops = [r.stop_fold for r in completed if r.stop_fold is not None]
    histogram = Counter(stops)
    first_bin = min(_EARLIEST_DEFAULT_STOP, *stops)
    stop_fold_histogram = {f: histogram[f] for f in range(first_bin, e_max + 1)}
    mean_stop = _mean(stops)

    by_combination: dict[int, list[RunRecord]] = defaultdict(list)
    for r in completed:
        by_combination[r.combination].append(r)
    combinations = [_combination_stats(by_combination[c]) for c in sorted(by_combination)]

    pct_by_task: dict[str, list[float]] = defaultdict(list)
    for r in completed:
        if r.pct_diff is not None:
            pct_by_task[r.task].append(r.pct_diff)

    table: dict[str, dict[str, list[int]]] = defaultdict(lambda: defaultdict(list))
    by_learner: dict[str, list[int]] = defaultdict(list)
    by_dataset: dict[str, list[int]] = defaultdict(list)
    for r in completed:
        assert r.stop_fold is not None
        table[r.learner.value][r.dataset].append(r.stop_fold)
        by_learner[r.learner.value].append(r.stop_fold)
        by_dataset[r.dataset].append(r.stop_fold)

    timings = [t for r in completed for t in r.per_fold_wall_time]
    mean_fold_time = _mean(timings) if timings else None
    saved_folds = sum(r.saved_folds or 0 for r in completed)

    return AggregateReport(
        e_max=e_max,
        runs=len(completed),
        failed_runs=len(ordered) - len(completed),
        overall_mean_stop_fold=mean_stop,
        mean_saved_fraction=_saved_fraction(mean_stop, e_max),
        overall_within_ci_fraction=_fraction(
            [r.within_ci for r in completed if r.within_ci is not None]
        ),
        stop_fold_histogram=stop_fold_histogram,
        stop_fold_distribution={
            f: n / len(stops) for f, n in stop_fold_histogram.items()
        },
        within_ci_distribution=_within_ci_distribution(combinations),
        pct_diff_by_task={
            task: distribution(values) for task, values in sorted(pct_by_task.items())
        },
        combinations=combinations,
        stop_fold_table={
            learner: {dataset: _mean(v) for dataset, v in sorted(row.items())}
            for learner, row in sorted(table.items())
        },
        learner_mean_stop_fold={k: _mean(v) for k, v in sorted(by_learner.items())},
        dataset_mean_stop_fold={k: _mean(v) for k, v in sorted(by_dataset.items())},
        mean_fold_wall_time=mean_fold_time,
        saved_wall_time=(
            mean_fold_time * saved_folds if mean_fold_time is not None else None
        ),
    )


def example_traces(records: Sequence[RunRecord]) -> list[TracePoint]:
    """Fold-by-fold convergence of the first successful run of each combination."""
    firsts: dict[int, RunRecord] = {}
    for r in sorted(records, key=lambda r: (r.combination, r.run)):
        if not r.failed and r.combination not in firsts:
            firsts[r.combination] = r

    points: list[TracePoint] = []
    for combination in sorted(firsts):
        r = firsts[combination]
        assert r.stop_fold is not None
        for e in range(1, len(r.fold_scores) + 1):
            prefix = r.fold_scores[:e]
            low, high = confidence_interval(prefix) if e >= 2 else (None, None)
            points.append(
                TracePoint(
                    combination=combination,
                    dataset=r.dataset,
                    learner=r.learner,
                    e=e,
                    score=prefix[-1],
                    running_mean=running_mean(prefix),
                    ci_low=low,
                    ci_high=high,
                    stop_fold=r.stop_fold,
                )
            )
    return points
