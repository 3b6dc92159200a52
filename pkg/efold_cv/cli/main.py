import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from injector import Injector

from efold_cv.cli.experiment import (
    ExperimentConfig,
    load_datasets,
    load_experiment,
    resolve_pairs,
)
from efold_cv.cli.report_writer import (
    FAILURES_FILE,
    read_records,
    write_reports,
    write_run_artifacts,
)
from efold_cv.components.ingest.ingest_component import IngestComponent
from efold_cv.core.errors import ConfigurationError, RunFailedError
from efold_cv.di import global_injector
from efold_cv.harness.harness_service import HarnessService
from efold_cv.harness.model import RunMode
from efold_cv.settings.settings import Settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_RUN_FAILURE = 2
EXIT_IO_ERROR = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="efold", description="e-fold cross-validation benchmark harness"
    )
    parser.add_argument(
        "--log-file",
        help="Optional path to a log file. If provided, logs will be written to this file.",
        type=str,
        default=None,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run an experiment and write its artifacts")
    run.add_argument("--config", type=Path, required=True, help="Experiment YAML file")
    run.add_argument(
        "--mode",
        choices=["simulate", "early-stop"],
        default=None,
        help="Override the experiment's run mode",
    )
    run.add_argument(
        "--workers", type=int, default=None, help="Override the process pool size"
    )
    run.add_argument(
        "--allow-failures",
        action=argparse.BooleanOptionalAction,
        default=False,
        help="Keep going when a run fails, its record goes to failures.csv",
    )

    validate = commands.add_parser(
        "validate", help="Check an experiment config and its datasets without running"
    )
    validate.add_argument("--config", type=Path, required=True)

    report = commands.add_parser(
        "report", help="Recompute the summary and plot data from a records file"
    )
    report.add_argument("--records", type=Path, required=True)
    report.add_argument(
        "--output-dir",
        type=Path,
        default=None,
        help="Where to write the reports, defaults to the records file's folder",
    )
    return parser


def _add_log_file(path: str) -> None:
    file_handler = logging.FileHandler(path, mode="a")
    file_handler.setFormatter(
        logging.Formatter(
            "[%(asctime)s.%(msecs)03d] [%(levelname)s] %(name)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
    )
    logging.getLogger().addHandler(file_handler)


def _report_configuration_error(e: ConfigurationError) -> None:
    print(f"error: {e}", file=sys.stderr)
    for field_error in e.field_errors:
        print(f"  {field_error}", file=sys.stderr)


def cmd_run(
    config_path: Path,
    injector: Injector,
    mode: str | None = None,
    workers: int | None = None,
    allow_failures: bool = False,
) -> int:
    config = load_experiment(config_path, injector.get(Settings))
    overrides: dict[str, object] = {}
    if mode is not None:
        overrides["mode"] = RunMode(mode.replace("-", "_"))
    if workers is not None:
        if workers < 1:
            raise ConfigurationError(f"--workers must be at least 1, got {workers}")
        overrides["workers"] = workers
    config = config.model_copy(update=overrides)

    datasets = load_datasets(config, injector.get(IngestComponent))
    pairs = resolve_pairs(config, datasets)
    result = injector.get(HarnessService).run_experiment(
        pairs, config.plan(), allow_failures=allow_failures
    )
    if result.failures and not result.records:
        logger.error(
            "All %s runs failed, no artifacts written to %s",
            len(result.failures),
            config.output_dir,
        )
        first = result.failures[0]
        raise RunFailedError(
            first.dataset,
            first.learner,
            first.seed,
            first.failed_fold or 0,
            first.error or "",
        )
    report = write_run_artifacts(config.output_dir, result.records, result.failures)
    print(
        f"{report.runs} runs, mean stop fold {report.overall_mean_stop_fold:.2f}, "
        f"artifacts in {config.output_dir}"
    )
    if result.failures:
        print(f"{len(result.failures)} run(s) failed, see {FAILURES_FILE}")
    return EXIT_OK


def validate_experiment(config_path: Path, injector: Injector) -> list[str]:
    """Every problem with the config and its datasets, empty when it is runnable."""
    try:
        config: ExperimentConfig = load_experiment(config_path, injector.get(Settings))
    except ConfigurationError as e:
        return [str(e), *e.field_errors]

    problems: list[str] = []
    ingest = injector.get(IngestComponent)
    datasets = []
    for entry in config.datasets:
        try:
            datasets.append(
                ingest.load(entry.source(), config.base_dir, config.efold.e_max)
            )
        except (ValueError, OSError) as e:
            problems.append(f"{entry.label()}: {e}")
    if problems:
        return problems
    try:
        resolve_pairs(config, datasets)
    except ValueError as e:
        problems.append(str(e))
    return problems


def cmd_validate(config_path: Path, injector: Injector) -> int:
    problems = validate_experiment(config_path, injector)
    if not problems:
        print("ok")
        return EXIT_OK
    for problem in problems:
        print(problem)
    return EXIT_CONFIG_ERROR


def cmd_report(records_path: Path, output_dir: Path | None = None) -> int:
    records = read_records(records_path)
    failures_path = records_path.parent / FAILURES_FILE
    failures = read_records(failures_path) if failures_path.exists() else []
    if not records and not failures:
        raise ConfigurationError(f"records file has no rows: {records_path}")
    target = output_dir or records_path.parent
    report = write_reports(target, records, failures)
    print(f"{report.runs} runs, mean stop fold {report.overall_mean_stop_fold:.2f}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None, injector: Injector | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_file:
        _add_log_file(args.log_file)
    injector = injector or global_injector

    try:
        match args.command:
            case "run":
                return cmd_run(
                    args.config, injector, args.mode, args.workers, args.allow_failures
                )
            case "validate":
                return cmd_validate(args.config, injector)
            case "report":
                return cmd_report(args.records, args.output_dir)
    except RunFailedError as e:
        logger.error("Aborting experiment: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUN_FAILURE
    except ConfigurationError as e:
        _report_configuration_error(e)
        return EXIT_CONFIG_ERROR
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO_ERROR
    raise AssertionError(f"unknown command {args.command}")


def start() -> None:
    sys.exit(main())
