"""Run artifacts: the records file, the summary and the plot-data files.

Every file is written to a temporary sibling first and moved into place with
`os.replace`, so a crash never leaves a half-written artifact behind.
"""

import io
import logging
import os
import tempfile
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, TextIO

import pandas as pd
import yaml
from pydantic import ValidationError

from efold_cv.constants import RECORDS_SCHEMA_VERSION
from efold_cv.core.errors import CsvParseError
from efold_cv.harness.aggregate import aggregate, example_traces
from efold_cv.harness.model import AggregateReport, RunRecord

logger = logging.getLogger(__name__)

RECORDS_FILE = "records.csv"
FAILURES_FILE = "failures.csv"
SUMMARY_FILE = "summary.yaml"
WITHIN_CI_FILE = "plot_within_ci.tsv"
STOP_FOLDS_FILE = "plot_stop_folds.tsv"
PCT_DIFF_FILE = "plot_pct_diff.tsv"
TABLE_FILE = "table_stop_folds.tsv"
TRACES_FILE = "traces.tsv"

SCHEMA_LINE = f"# efold-cv records schema={RECORDS_SCHEMA_VERSION}"

RECORD_COLUMNS: tuple[str, ...] = (
    "combination",
    "run",
    "dataset",
    "learner",
    "task",
    "seed",
    "mode",
    "e_max",
    "status",
    "stop_fold",
    "m_e",
    "m_full",
    "ci_low",
    "ci_high",
    "within_ci",
    "pct_diff",
    "saved_folds",
    "fold_scores",
    "fold_wall_times",
    "failed_fold",
    "error",
)
TIME_COLUMNS = frozenset({"fold_wall_times"})
_LIST_COLUMNS = {"fold_scores": "fold_scores", "fold_wall_times": "per_fold_wall_time"}
_INT_COLUMNS = frozenset(
    {"combination", "run", "seed", "e_max", "stop_fold", "saved_folds", "failed_fold"}
)
_FLOAT_COLUMNS = frozenset({"m_e", "m_full", "ci_low", "ci_high", "pct_diff"})

TRACE_COLUMNS: tuple[str, ...] = (
    "combination",
    "dataset",
    "learner",
    "e",
    "score",
    "running_mean",
    "ci_low",
    "ci_high",
    "stop_fold",
)


def atomic_write(path: Path, write: Callable[[TextIO], None]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    # delete=False so the file survives close() and can be renamed
    with tempfile.NamedTemporaryFile(
        "w",
        encoding="utf-8",
        newline="",
        dir=path.parent,
        prefix=f".{path.name}.",
        delete=False,
    ) as tmp:
        tmp_path = Path(tmp.name)
        try:
            write(tmp)
        except BaseException:
            tmp.close()
            tmp_path.unlink(missing_ok=True)
            raise
    os.replace(tmp_path, path)
    logger.debug("Wrote artifact path=%s", path)


def _format_cell(value: Any) -> str:
    match value:
        case None:
            return ""
        case bool():
            return "true" if value else "false"
        case float():
            return repr(value)
        case list():
            return ";".join(repr(float(v)) for v in value)
        case _:
            return str(value)


def _record_row(record: RunRecord) -> dict[str, str]:
    fields = record.model_dump()
    row = {}
    for column in RECORD_COLUMNS:
        row[column] = _format_cell(fields[_LIST_COLUMNS.get(column, column)])
    return row


def records_frame(records: Sequence[RunRecord]) -> pd.DataFrame:
    ordered = sorted(records, key=lambda r: (r.combination, r.run))
    return pd.DataFrame([_record_row(r) for r in ordered], columns=list(RECORD_COLUMNS))


def write_records(path: Path, records: Sequence[RunRecord]) -> None:
    frame = records_frame(records)

    def write(f: TextIO) -> None:
        f.write(SCHEMA_LINE + "\n")
        frame.to_csv(f, index=False, lineterminator="\n")

    atomic_write(path, write)


def _parse_cell(column: str, raw: str) -> Any:
    if raw == "":
        return [] if column in _LIST_COLUMNS else None
    if column in _LIST_COLUMNS:
        return [float(v) for v in raw.split(";")]
    if column in _INT_COLUMNS:
        return int(raw)
    if column in _FLOAT_COLUMNS:
        return float(raw)
    if column == "within_ci":
        if raw not in ("true", "false"):
            raise ValueError(f"expected true or false, got '{raw}'")
        return raw == "true"
    return raw


def read_records(path: Path) -> list[RunRecord]:
    """Parse a records file; errors name the file line (1-based) and column."""
    with path.open("r", encoding="utf-8", newline="") as f:
        first = f.readline().rstrip("\r\n")
        if first != SCHEMA_LINE:
            raise CsvParseError(
                str(path), 1, "", f"expected schema line '{SCHEMA_LINE}', got '{first}'"
            )
        body = f.read()
    try:
        frame = pd.read_csv(
            io.StringIO(body), dtype=str, keep_default_na=False, encoding="utf-8"
        )
    except pd.errors.EmptyDataError as e:
        raise CsvParseError(str(path), 2, "", "missing header row") from e
    except pd.errors.ParserError as e:
        raise CsvParseError(str(path), 0, "", f"malformed CSV: {e}") from e
    if tuple(frame.columns) != RECORD_COLUMNS:
        raise CsvParseError(
            str(path), 2, "", f"unexpected header {list(frame.columns)}"
        )

    records = []
    # line 1 is the schema line, line 2 the header
    for line, row in enumerate(frame.itertuples(index=False, name=None), start=3):
        fields: dict[str, Any] = {}
        for column, raw in zip(RECORD_COLUMNS, row, strict=True):
            try:
                fields[_LIST_COLUMNS.get(column, column)] = _parse_cell(column, raw)
            except ValueError as e:
                raise CsvParseError(str(path), line, column, str(e)) from None
        try:
            records.append(RunRecord.model_validate(fields))
        except ValidationError as e:
            error = e.errors()[0]
            column = ".".join(str(part) for part in error["loc"])
            raise CsvParseError(str(path), line, column, error["msg"]) from None
    return records


def write_summary(path: Path, report: AggregateReport) -> None:
    content = report.model_dump(mode="json")
    atomic_write(
        path,
        lambda f: yaml.safe_dump(content, f, sort_keys=False, allow_unicode=True),
    )


def _write_tsv(path: Path, frame: pd.DataFrame) -> None:
    atomic_write(
        path, lambda f: frame.to_csv(f, sep="\t", index=False, lineterminator="\n")
    )


def within_ci_frame(report: AggregateReport) -> pd.DataFrame:
    return pd.DataFrame(
        list(report.within_ci_distribution.items()),
        columns=["within_ci_pct", "fraction_of_combinations"],
    )


def stop_folds_frame(report: AggregateReport) -> pd.DataFrame:
    return pd.DataFrame(
        [
            (fold, report.stop_fold_histogram[fold], fraction)
            for fold, fraction in report.stop_fold_distribution.items()
        ],
        columns=["stop_fold", "runs", "fraction_of_runs"],
    )


def pct_diff_frame(records: Sequence[RunRecord]) -> pd.DataFrame:
    rows = [
        (r.task.value, r.dataset, r.learner.value, r.combination, r.run, r.pct_diff)
        for r in sorted(records, key=lambda r: (r.combination, r.run))
        if r.pct_diff is not None
    ]
    return pd.DataFrame(
        rows, columns=["task", "dataset", "learner", "combination", "run", "pct_diff"]
    )


def stop_fold_table_frame(report: AggregateReport) -> pd.DataFrame:
    datasets = list(report.dataset_mean_stop_fold)
    rows = []
    for learner, row in report.stop_fold_table.items():
        rows.append(
            [learner, *(row.get(d) for d in datasets), report.learner_mean_stop_fold[learner]]
        )
    rows.append(
        [
            "average",
            *(report.dataset_mean_stop_fold[d] for d in datasets),
            report.overall_mean_stop_fold,
        ]
    )
    return pd.DataFrame(rows, columns=["learner", *datasets, "average"])


def traces_frame(records: Sequence[RunRecord]) -> pd.DataFrame:
    points = example_traces(records)
    return pd.DataFrame(
        [p.model_dump(mode="json") for p in points], columns=list(TRACE_COLUMNS)
    )


def write_reports(
    output_dir: Path,
    records: Sequence[RunRecord],
    failures: Sequence[RunRecord] = (),
    report: AggregateReport | None = None,
) -> AggregateReport:
    """Aggregate `records` and write the summary and every plot-data file."""
    if report is None:
        report = aggregate([*records, *failures])
    write_summary(output_dir / SUMMARY_FILE, report)
    _write_tsv(output_dir / WITHIN_CI_FILE, within_ci_frame(report))
    _write_tsv(output_dir / STOP_FOLDS_FILE, stop_folds_frame(report))
    _write_tsv(output_dir / PCT_DIFF_FILE, pct_diff_frame(records))
    _write_tsv(output_dir / TABLE_FILE, stop_fold_table_frame(report))
    _write_tsv(output_dir / TRACES_FILE, traces_frame(records))
    logger.info("Wrote reports output_dir=%s runs=%s", output_dir, report.runs)
    return report


def write_run_artifacts(
    output_dir: Path,
    records: Sequence[RunRecord],
    failures: Sequence[RunRecord] = (),
) -> AggregateReport:
    """Write records, failures and reports of one run into `output_dir`.

    Nothing is written when the records cannot be aggregated. A failures file
    left over from an earlier run in the same folder is removed when this run
    has no failures.
    """
    report = aggregate([*records, *failures])
    write_records(output_dir / RECORDS_FILE, records)
    failures_path = output_dir / FAILURES_FILE
    if failures:
        write_records(failures_path, failures)
    elif failures_path.exists():
        failures_path.unlink()
        logger.info("Removed stale failures file path=%s", failures_path)
    return write_reports(output_dir, records, failures, report)
