import logging
import threading
from pathlib import Path

import numpy as np
import pandas as pd
from injector import inject, singleton

from efold_cv.components.ingest.model import (
    BundledSource,
    DatasetManifest,
    DatasetSource,
    DropColumn,
    EncodeCategorical,
    EncodeTarget,
    ManifestSource,
    SyntheticSource,
)
from efold_cv.components.ingest.synthetic import generate
from efold_cv.core.errors import (
    CsvParseError,
    DatasetValidationError,
    ManifestError,
    NonFiniteValueError,
)
from efold_cv.core.model import Dataset, TaskKind
from efold_cv.core.validation import validate_dataset
from efold_cv.paths import absolute_or_from
from efold_cv.settings.settings import Settings
from efold_cv.settings.yaml import load_yaml_mapping
from efold_cv.utils.typing import FloatArray, IntArray

logger = logging.getLogger(__name__)

# header is line 1, first data row is line 2
_FIRST_DATA_LINE = 2


def _first_appearance_codes(values: pd.Series) -> IntArray:
    codes, _ = pd.factorize(values, sort=False)
    return codes.astype(np.int64)


def _parse_numeric(values: pd.Series, column: str, path: Path) -> FloatArray:
    parsed = pd.to_numeric(values, errors="coerce").to_numpy(dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(parsed))
    if bad.size == 0:
        return parsed
    row = int(bad[0])
    raw = values.iloc[row]
    line = row + _FIRST_DATA_LINE
    try:
        float(raw)
    except (TypeError, ValueError):
        raise CsvParseError(
            str(path), line, column, f"unparseable numeric cell '{raw}'"
        ) from None
    raise NonFiniteValueError(str(path), line, column, f"non-finite value '{raw}'")


def read_manifest(path: Path) -> DatasetManifest:
    """Load a manifest YAML file; its relative CSV path resolves next to it."""
    if not path.exists():
        raise ManifestError(f"manifest file not found: {path}")
    content = load_yaml_mapping(path)
    try:
        return DatasetManifest.model_validate({**content, "base_dir": path.parent})
    except ValueError as e:
        raise ManifestError(f"invalid manifest {path}: {e}") from e


def load_csv(manifest: DatasetManifest, e_max: int = 10) -> Dataset:
    """Read the manifest's CSV, apply its transforms in order and validate.

    Feature columns keep their file order, minus dropped ones. Classification
    targets are renumbered 0..C-1 by order of first appearance.
    """
    path = manifest.resolved_path()
    if not path.exists():
        raise ManifestError(f"dataset '{manifest.name}': file not found {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise CsvParseError(str(path), 0, "", f"cannot read CSV: {e}") from e

    columns: dict[str, pd.Series] = {name: frame[name] for name in frame.columns}
    encoded: dict[str, FloatArray] = {}
    target_codes: IntArray | None = None

    def require(column: str) -> None:
        if column not in columns:
            raise ManifestError(
                f"dataset '{manifest.name}': column '{column}' not found in {path}"
            )

    require(manifest.target_column)
    for transform in manifest.transforms:
        match transform:
            case DropColumn(column=column):
                require(column)
                del columns[column]
                encoded.pop(column, None)
            case EncodeCategorical(column=column):
                require(column)
                encoded[column] = _first_appearance_codes(columns[column]).astype(
                    np.float64
                )
            case EncodeTarget():
                target_codes = _first_appearance_codes(columns[manifest.target_column])

    feature_names = [name for name in columns if name != manifest.target_column]
    features = np.empty((len(frame), len(feature_names)))
    for j, name in enumerate(feature_names):
        if name in encoded:
            features[:, j] = encoded[name]
        else:
            features[:, j] = _parse_numeric(columns[name], name, path)

    target_raw = columns[manifest.target_column]
    class_count: int | None = None
    if manifest.task is TaskKind.REGRESSION:
        target = _parse_numeric(target_raw, manifest.target_column, path)
    else:
        if target_codes is None:
            numeric = _parse_numeric(target_raw, manifest.target_column, path)
            target_codes = _first_appearance_codes(pd.Series(numeric))
        target = target_codes
        class_count = int(target_codes.max()) + 1 if target_codes.size else 0

    dataset = Dataset(
        name=manifest.name,
        features=features,
        target=target,
        task=manifest.task,
        class_count=class_count,
        feature_names=tuple(feature_names),
        metadata={"source": str(path)},
    )
    result = validate_dataset(dataset, e_max)
    if not result.ok:
        raise DatasetValidationError(manifest.name, list(result.violations))
    logger.info(
        "Loaded dataset name=%s rows=%s features=%s task=%s",
        dataset.name,
        dataset.n_rows,
        dataset.n_features,
        dataset.task,
    )
    return dataset


def write_csv(dataset: Dataset, path: Path, target_column: str = "target") -> None:
    frame = pd.DataFrame(np.asarray(dataset.features), columns=list(dataset.feature_names))
    frame[target_column] = np.asarray(dataset.target)
    frame.to_csv(path, index=False, encoding="utf-8")


@singleton
class IngestComponent:
    """Resolves experiment dataset entries into validated datasets.

    Loaded datasets are cached per source, so every run of a combination
    shares one immutable instance.
    """

    @inject
    def __init__(self, settings: Settings) -> None:
        self.bundled_folder = absolute_or_from(settings.data.bundled_datasets_folder)
        self._cache: dict[str, Dataset] = {}
        self._cache_lock = threading.Lock()

    def bundled_manifest(self, name: str) -> DatasetManifest:
        return read_manifest(self.bundled_folder / f"{name}.yaml")

    def resolve_manifest(self, source: ManifestSource, base_dir: Path) -> DatasetManifest:
        if isinstance(source.manifest, DatasetManifest):
            manifest = source.manifest
            if manifest.base_dir is None:
                manifest = manifest.model_copy(update={"base_dir": base_dir})
            return manifest
        return read_manifest(absolute_or_from(source.manifest, base_dir))

    def load(self, source: DatasetSource, base_dir: Path, e_max: int = 10) -> Dataset:
        match source:
            case SyntheticSource(synthetic=spec):
                key = f"synthetic:{spec.model_dump_json()}"
            case BundledSource(bundled=name):
                key = f"bundled:{name}"
            case ManifestSource():
                manifest = self.resolve_manifest(source, base_dir)
                key = f"manifest:{manifest.resolved_path()}:{manifest.model_dump_json()}"
        key = f"{key}:e_max={e_max}"

        with self._cache_lock:
            if key in self._cache:
                return self._cache[key]

        match source:
            case SyntheticSource(synthetic=spec):
                dataset = generate(spec)
                result = validate_dataset(dataset, e_max)
                if not result.ok:
                    raise DatasetValidationError(dataset.name, list(result.violations))
            case BundledSource(bundled=name):
                dataset = load_csv(self.bundled_manifest(name), e_max)
            case ManifestSource():
                dataset = load_csv(self.resolve_manifest(source, base_dir), e_max)

        with self._cache_lock:
            self._cache[key] = dataset
        return dataset
