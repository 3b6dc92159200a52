from pathlib import Path

import numpy as np
import pytest

from efold_cv.components.ingest.ingest_component import (
    IngestComponent,
    load_csv,
    read_manifest,
    write_csv,
)
from efold_cv.components.ingest.model import (
    BundledSource,
    DatasetManifest,
    GaussianBlobsSpec,
    ManifestSource,
    SyntheticSource,
)
from efold_cv.core.errors import (
    CsvParseError,
    DatasetValidationError,
    ManifestError,
    NonFiniteValueError,
)
from efold_cv.core.model import TaskKind
from tests.fixtures.datasets import WriteCsv
from tests.fixtures.mock_injector import MockInjector

STUDENTS = """StudentID,gender,hours,grade
S1,F,1.5,low
S2,M,2.0,high
S3,F,3.5,mid
S4,M,0.5,low
S5,F,4.0,high
"""


def test_transforms_are_applied_in_order(write_manifest: WriteCsv) -> None:
    path = write_manifest(
        STUDENTS,
        "grade",
        "multiclass",
        [
            {"op": "drop_column", "column": "StudentID"},
            {"op": "encode_categorical", "column": "gender"},
            {"op": "encode_target"},
        ],
    )
    d = load_csv(read_manifest(path), e_max=4)
    assert d.feature_names == ("gender", "hours")
    assert d.features.tolist() == [
        [0.0, 1.5],
        [1.0, 2.0],
        [0.0, 3.5],
        [1.0, 0.5],
        [0.0, 4.0],
    ]
    # labels numbered by first appearance: low, high, mid
    assert d.target.tolist() == [0, 1, 2, 0, 1]
    assert d.class_count == 3
    assert d.task is TaskKind.MULTICLASS


def test_text_column_without_encoding_names_line_and_column(write_manifest: WriteCsv) -> None:
    path = write_manifest(STUDENTS, "grade", "multiclass", [{"op": "encode_target"}])
    with pytest.raises(CsvParseError) as error:
        load_csv(read_manifest(path), e_max=4)
    assert error.value.line == 2
    assert error.value.column == "StudentID"


def test_unparseable_cell_reports_its_line(write_manifest: WriteCsv) -> None:
    csv = "a,y\n1.0,0.5\n2.0,0.7\nabc,0.1\n4.0,0.2\n"
    path = write_manifest(csv, "y", "regression")
    with pytest.raises(CsvParseError, match=r":4 column 'a': unparseable numeric cell 'abc'"):
        load_csv(read_manifest(path), e_max=4)


def test_nan_cell_is_a_non_finite_error(write_manifest: WriteCsv) -> None:
    csv = "a,y\n1.0,0.5\n2.0,nan\n3.0,0.1\n4.0,0.2\n"
    path = write_manifest(csv, "y", "regression")
    with pytest.raises(NonFiniteValueError) as error:
        load_csv(read_manifest(path), e_max=4)
    assert error.value.line == 3
    assert error.value.column == "y"


def test_missing_column_names_the_manifest(write_manifest: WriteCsv) -> None:
    path = write_manifest("a,y\n1,2\n", "target", "regression", name="broken")
    with pytest.raises(ManifestError, match="dataset 'broken': column 'target'"):
        load_csv(read_manifest(path))


def test_missing_csv_names_the_manifest(tmp_path: Path) -> None:
    manifest = DatasetManifest(
        name="ghost", path=Path("ghost.csv"), target_column="y", task=TaskKind.REGRESSION
    )
    with pytest.raises(ManifestError, match="dataset 'ghost': file not found"):
        load_csv(manifest.model_copy(update={"base_dir": tmp_path}))


def test_missing_manifest_file(tmp_path: Path) -> None:
    with pytest.raises(ManifestError, match="manifest file not found"):
        read_manifest(tmp_path / "nope.yaml")


def test_invalid_dataset_lists_its_violations(write_manifest: WriteCsv) -> None:
    csv = "a,y\n" + "".join(f"{i}.0,0\n" for i in range(12))
    path = write_manifest(csv, "y", "binary")
    with pytest.raises(DatasetValidationError) as error:
        load_csv(read_manifest(path))
    assert error.value.dataset == "sample"
    assert {v.invariant for v in error.value.violations} == {"class_count"}


def test_manifest_rejects_dropping_the_target() -> None:
    with pytest.raises(ValueError, match="cannot drop the target"):
        DatasetManifest.model_validate(
            {
                "name": "x",
                "path": "x.csv",
                "target_column": "y",
                "task": "binary",
                "transforms": [{"op": "drop_column", "column": "y"}],
            }
        )


def test_written_csv_loads_back_identically(blobs, tmp_path: Path) -> None:
    write_csv(blobs, tmp_path / "blobs.csv")
    manifest = DatasetManifest(
        name=blobs.name,
        path=Path("blobs.csv"),
        target_column="target",
        task=blobs.task,
        base_dir=tmp_path,
    )
    loaded = load_csv(manifest)
    assert np.allclose(loaded.features, blobs.features, rtol=0, atol=1e-12)
    assert np.array_equal(loaded.target, blobs.target)
    assert loaded.feature_names == blobs.feature_names
    assert loaded.class_count == blobs.class_count


@pytest.mark.parametrize(
    ("name", "rows", "features", "task", "class_count"),
    [
        ("iris_like", 150, 4, TaskKind.MULTICLASS, 3),
        ("wine_like", 178, 13, TaskKind.MULTICLASS, 3),
        ("cancer_like", 569, 12, TaskKind.BINARY, 2),
        ("student_like", 400, 4, TaskKind.MULTICLASS, 3),
        ("era_like", 1000, 4, TaskKind.REGRESSION, None),
    ],
)
def test_bundled_datasets(
    injector: MockInjector,
    name: str,
    rows: int,
    features: int,
    task: TaskKind,
    class_count: int | None,
) -> None:
    ingest = injector.get(IngestComponent)
    d = ingest.load(BundledSource(bundled=name), Path.cwd())
    assert (d.n_rows, d.n_features, d.task, d.class_count) == (
        rows,
        features,
        task,
        class_count,
    )


def test_loaded_datasets_are_cached(injector: MockInjector) -> None:
    ingest = injector.get(IngestComponent)
    source = SyntheticSource(
        synthetic=GaussianBlobsSpec(classes=3, per_class=10, dims=2, spread=1.0, seed=0)
    )
    assert ingest.load(source, Path.cwd()) is ingest.load(source, Path.cwd())


def test_manifest_path_resolves_against_the_declaring_folder(
    injector: MockInjector, write_manifest: WriteCsv, tmp_path: Path
) -> None:
    write_manifest(STUDENTS, "grade", "multiclass", name="students")
    ingest = injector.get(IngestComponent)
    manifest = ingest.resolve_manifest(
        ManifestSource.model_validate({"manifest": "students.yaml"}), tmp_path
    )
    assert manifest.resolved_path() == tmp_path / "students.csv"
