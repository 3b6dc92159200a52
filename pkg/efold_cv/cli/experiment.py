import logging
import os
import typing
from pathlib import Path
from typing import Any

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from efold_cv.components.ingest.ingest_component import IngestComponent
from efold_cv.components.ingest.model import (
    BundledSource,
    DatasetManifest,
    DatasetSource,
    ManifestSource,
    SyntheticSource,
    SyntheticSpec,
)
from efold_cv.components.learners.model import LearnerSpec, is_compatible
from efold_cv.core.errors import ConfigurationError, IncompatibleTaskError
from efold_cv.core.model import Dataset, EfoldConfig
from efold_cv.harness.model import RunMode, RunPlan
from efold_cv.paths import absolute_or_from
from efold_cv.settings.settings import Settings
from efold_cv.settings.yaml import load_yaml_mapping

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "EFOLD_OUTPUT_DIR"


def _as_learner_spec(value: Any) -> Any:
    # a bare kind string is shorthand for the default hyperparameters
    if isinstance(value, str):
        return {"kind": value}
    return value


class DatasetEntry(BaseModel):
    """One entry of `datasets:`, exactly one of manifest, synthetic or bundled.

    `learners` restricts the entry to its own learner list. Every learner
    listed there must fit the dataset's task.
    """

    model_config = ConfigDict(extra="forbid")

    manifest: DatasetManifest | Path | None = None
    synthetic: SyntheticSpec | None = None
    bundled: str | None = None
    learners: list[LearnerSpec] | None = None

    @field_validator("learners", mode="before")
    @classmethod
    def _learner_shorthand(cls, value: Any) -> Any:
        if isinstance(value, list):
            return [_as_learner_spec(v) for v in value]
        return value

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "DatasetEntry":
        given = [
            key
            for key in ("manifest", "synthetic", "bundled")
            if getattr(self, key) is not None
        ]
        if len(given) != 1:
            raise ValueError(
                f"a dataset entry needs exactly one of manifest, synthetic, bundled; got {given or 'none'}"
            )
        return self

    def source(self) -> DatasetSource:
        if self.manifest is not None:
            return ManifestSource(manifest=self.manifest)
        if self.synthetic is not None:
            return SyntheticSource(synthetic=self.synthetic)
        assert self.bundled is not None
        return BundledSource(bundled=self.bundled)

    def label(self) -> str:
        if isinstance(self.manifest, DatasetManifest):
            return f"manifest '{self.manifest.name}'"
        if self.manifest is not None:
            return f"manifest '{self.manifest}'"
        if self.synthetic is not None:
            return f"synthetic '{self.synthetic.dataset_name()}'"
        return f"bundled '{self.bundled}'"


class ExperimentConfig(BaseModel):
    """A validated experiment file, with omitted fields taken from the settings."""

    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    datasets: list[DatasetEntry] = Field(min_length=1)
    learners: list[LearnerSpec] = Field(default_factory=list)
    runs_per_combination: int = Field(ge=1)
    efold: EfoldConfig
    base_seed: int = Field(ge=0, lt=2**64)
    mode: RunMode
    workers: int = Field(ge=1)
    output_dir: Path
    ci_level: float = Field(gt=0.0, lt=1.0)
    ci_uses_standard_error: bool
    base_dir: Path = Field(exclude=True)

    @field_validator("learners", mode="before")
    @classmethod
    def _learner_shorthand(cls, value: Any) -> Any:
        if isinstance(value, list):
            return [_as_learner_spec(v) for v in value]
        return value

    @field_validator("mode", mode="before")
    @classmethod
    def _dashed_mode(cls, value: Any) -> Any:
        if isinstance(value, str):
            return value.replace("-", "_")
        return value

    @model_validator(mode="after")
    def _has_learners(self) -> "ExperimentConfig":
        missing = [e.label() for e in self.datasets if not e.learners and not self.learners]
        if missing:
            raise ValueError(f"no learners for {', '.join(missing)}")
        return self

    def plan(self) -> RunPlan:
        return RunPlan(
            runs_per_combination=self.runs_per_combination,
            efold=self.efold,
            base_seed=self.base_seed,
            mode=self.mode,
            workers=self.workers,
            ci_level=self.ci_level,
            ci_uses_standard_error=self.ci_uses_standard_error,
        )


def _field_errors(error: ValidationError) -> list[str]:
    return [
        f"{'.'.join(str(part) for part in e['loc']) or '<root>'}: {e['msg']}"
        for e in error.errors()
    ]


def load_experiment(
    path: Path,
    settings: Settings,
    environ: typing.Mapping[str, str] = os.environ,
) -> ExperimentConfig:
    """Read and validate an experiment YAML file.

    Relative paths inside the file resolve against its directory. The output
    directory comes from `EFOLD_OUTPUT_DIR` when set, then the file, then the
    settings.
    """
    if not path.exists():
        raise ConfigurationError(f"experiment config not found: {path}")
    raw = load_yaml_mapping(path, environ)
    base_dir = path.resolve().parent

    efold = settings.efold.model_dump()
    if isinstance(raw.get("efold"), dict):
        efold.update(raw["efold"])
    elif "efold" in raw:
        efold = raw["efold"]

    if environ.get(OUTPUT_DIR_ENV):
        output_dir = absolute_or_from(environ[OUTPUT_DIR_ENV])
    elif "output_dir" in raw:
        output_dir = absolute_or_from(str(raw["output_dir"]), base_dir)
    else:
        output_dir = absolute_or_from(settings.run.output_dir)

    data = {
        "runs_per_combination": settings.harness.runs_per_combination,
        "base_seed": settings.harness.base_seed,
        "mode": settings.harness.mode,
        "workers": settings.run.workers,
        "ci_level": settings.harness.ci_level,
        "ci_uses_standard_error": settings.harness.ci_uses_standard_error,
        **raw,
        "efold": efold,
        "output_dir": output_dir,
        "base_dir": base_dir,
    }
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        errors = _field_errors(e)
        raise ConfigurationError(
            f"invalid experiment config {path}: {len(errors)} field error(s)", errors
        ) from e
    logger.info(
        "Loaded experiment name=%s datasets=%s learners=%s runs=%s",
        config.name,
        len(config.datasets),
        len(config.learners),
        config.runs_per_combination,
    )
    return config


def load_datasets(config: ExperimentConfig, ingest: IngestComponent) -> list[Dataset]:
    return [
        ingest.load(entry.source(), config.base_dir, config.efold.e_max)
        for entry in config.datasets
    ]


def resolve_pairs(
    config: ExperimentConfig, datasets: list[Dataset]
) -> list[tuple[Dataset, LearnerSpec]]:
    """Combinations in datasets-major order, learners in listed order.

    A dataset with its own learner list must be compatible with all of
    them. With the shared list, each dataset gets the learners that fit its
    task, and every shared learner has to fit at least one dataset.
    """
    problems: list[str] = []
    pairs: list[tuple[Dataset, LearnerSpec]] = []
    used: set[int] = set()
    for entry, dataset in zip(config.datasets, datasets, strict=True):
        if entry.learners:
            for spec in entry.learners:
                if is_compatible(spec.kind, dataset.task):
                    pairs.append((dataset, spec))
                else:
                    problems.append(
                        f"learner {spec.kind} cannot run on {entry.label()} "
                        f"({dataset.task} task)"
                    )
            continue
        compatible = [
            (i, spec)
            for i, spec in enumerate(config.learners)
            if is_compatible(spec.kind, dataset.task)
        ]
        if not compatible:
            problems.append(
                f"no learner in the experiment fits {entry.label()} ({dataset.task} task)"
            )
        for i, spec in compatible:
            used.add(i)
            pairs.append((dataset, spec))

    shared_users = any(not entry.learners for entry in config.datasets)
    for i, spec in enumerate(config.learners):
        if shared_users and i not in used:
            problems.append(f"learner {spec.kind} fits none of the experiment's datasets")
    if problems:
        raise IncompatibleTaskError("; ".join(problems))
    return pairs
