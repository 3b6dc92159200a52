import logging
import multiprocessing
from collections.abc import Iterator, Sequence
from typing import NamedTuple

import numpy as np
from injector import inject, singleton

from efold_cv.components.learners.model import LearnerSpec
from efold_cv.core.errors import RunFailedError
from efold_cv.core.model import Dataset
from efold_cv.harness.evaluation import evaluate_run
from efold_cv.harness.model import ExperimentResult, RunPlan, RunRecord
from efold_cv.settings.settings import Settings
from efold_cv.utils.progress import track

logger = logging.getLogger(__name__)


def derive_seed(base_seed: int, combination: int, run: int) -> int:
    """Per-run seed, a pure function of its position in the experiment."""
    state = np.random.SeedSequence([base_seed, combination, run]).generate_state(
        1, dtype=np.uint64
    )
    return int(state[0])


class _Job(NamedTuple):
    combination: int
    dataset_index: int
    learner: LearnerSpec
    run: int
    seed: int


# Filled once per worker process by the pool initializer.
_worker_datasets: list[Dataset] = []
_worker_plan: RunPlan | None = None


def _init_worker(datasets: list[Dataset], plan: RunPlan) -> None:
    global _worker_datasets, _worker_plan
    _worker_datasets = datasets
    _worker_plan = plan


def _evaluate(job: _Job, datasets: Sequence[Dataset], plan: RunPlan) -> RunRecord:
    return evaluate_run(
        datasets[job.dataset_index],
        job.learner,
        plan.efold,
        job.seed,
        plan.mode,
        combination=job.combination,
        run=job.run,
        ci_level=plan.ci_level,
        ci_uses_standard_error=plan.ci_uses_standard_error,
    )


def _evaluate_in_worker(job: _Job) -> RunRecord:
    assert _worker_plan is not None, "pool worker was not initialised"
    return _evaluate(job, _worker_datasets, _worker_plan)


@singleton
class HarnessService:
    """Runs every (dataset, learner, run) job of an experiment.

    Runs are independent and go to a process pool of `workers` processes.
    Folds inside a run stay sequential. Records come back in job order
    whatever the pool size, so the same plan always yields the same records.
    """

    @inject
    def __init__(self, settings: Settings) -> None:
        self.default_workers = settings.run.workers

    def plan_jobs(
        self,
        pairs: Sequence[tuple[Dataset, LearnerSpec]],
        plan: RunPlan,
    ) -> tuple[list[Dataset], list[_Job]]:
        datasets: list[Dataset] = []
        positions: dict[int, int] = {}
        jobs: list[_Job] = []
        for combination, (dataset, learner) in enumerate(pairs):
            if id(dataset) not in positions:
                positions[id(dataset)] = len(datasets)
                datasets.append(dataset)
            for run in range(plan.runs_per_combination):
                jobs.append(
                    _Job(
                        combination=combination,
                        dataset_index=positions[id(dataset)],
                        learner=learner,
                        run=run,
                        seed=derive_seed(plan.base_seed, combination, run),
                    )
                )
        return datasets, jobs

    def run_experiment(
        self,
        pairs: Sequence[tuple[Dataset, LearnerSpec]],
        plan: RunPlan,
        allow_failures: bool = False,
    ) -> ExperimentResult:
        datasets, jobs = self.plan_jobs(pairs, plan)
        workers = plan.workers or self.default_workers
        logger.info(
            "Starting experiment combinations=%s runs=%s mode=%s workers=%s",
            len(pairs),
            len(jobs),
            plan.mode,
            workers,
        )
        records: list[RunRecord] = []
        failures: list[RunRecord] = []
        for record in track(self._execute(datasets, jobs, plan, workers), len(jobs)):
            if not record.failed:
                records.append(record)
                continue
            assert record.failed_fold is not None
            if not allow_failures:
                raise RunFailedError(
                    record.dataset,
                    record.learner,
                    record.seed,
                    record.failed_fold,
                    record.error or "",
                )
            logger.warning(
                "Keeping going after failed run dataset=%s learner=%s seed=%s",
                record.dataset,
                record.learner,
                record.seed,
            )
            failures.append(record)
        logger.info(
            "Finished experiment completed=%s failed=%s", len(records), len(failures)
        )
        return ExperimentResult(records=records, failures=failures)

    def _execute(
        self, datasets: list[Dataset], jobs: list[_Job], plan: RunPlan, workers: int
    ) -> Iterator[RunRecord]:
        if workers == 1 or len(jobs) <= 1:
            for job in jobs:
                yield _evaluate(job, datasets, plan)
            return
        chunksize = max(1, len(jobs) // (workers * 8))
        with multiprocessing.Pool(
            processes=workers,
            initializer=_init_worker,
            initargs=(datasets, plan),
        ) as pool:
            # imap keeps submission order, so the output never depends on timing
            yield from pool.imap(_evaluate_in_worker, jobs, chunksize=chunksize)
