from pathlib import Path
from typing import Annotated, Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from efold_cv.core.model import TaskKind


class DropColumn(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: Literal["drop_column"] = "drop_column"
    column: str


class EncodeCategorical(BaseModel):
    """Ordinal encoding by order of first appearance."""

    model_config = ConfigDict(frozen=True)

    op: Literal["encode_categorical"] = "encode_categorical"
    column: str


class EncodeTarget(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: Literal["encode_target"] = "encode_target"


Transform = Annotated[
    DropColumn | EncodeCategorical | EncodeTarget, Field(discriminator="op")
]


class DatasetManifest(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    path: Path = Field(
        description="CSV file. Relative paths resolve against `base_dir`, the folder "
        "of the file that declared this manifest."
    )
    target_column: str
    task: TaskKind
    transforms: tuple[Transform, ...] = ()
    base_dir: Path | None = Field(None, exclude=True)

    @model_validator(mode="after")
    def _transforms_are_ordered(self) -> "DatasetManifest":
        dropped: set[str] = set()
        for transform in self.transforms:
            match transform:
                case DropColumn(column=column):
                    if column == self.target_column:
                        raise ValueError(f"cannot drop the target column '{column}'")
                    if column in dropped:
                        raise ValueError(f"column '{column}' dropped twice")
                    dropped.add(column)
                case EncodeCategorical(column=column):
                    if column in dropped:
                        raise ValueError(
                            f"encode_categorical on '{column}' after it was dropped"
                        )
                    if column == self.target_column:
                        raise ValueError(
                            "use encode_target to encode the target column"
                        )
                case EncodeTarget():
                    if self.task is TaskKind.REGRESSION:
                        raise ValueError("encode_target on a regression task")
        return self

    def resolved_path(self) -> Path:
        if self.path.is_absolute() or self.base_dir is None:
            return self.path
        return self.base_dir / self.path


class GaussianBlobsSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["gaussian_blobs"] = "gaussian_blobs"
    name: str | None = None
    classes: int = Field(ge=2)
    per_class: int = Field(ge=1)
    dims: int = Field(ge=1)
    spread: float = Field(gt=0.0, allow_inf_nan=False)
    seed: int = Field(ge=0, lt=2**64)

    def dataset_name(self) -> str:
        return self.name or f"blobs_c{self.classes}_n{self.per_class}_s{self.seed}"


class LinearRegressionSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["linear_regression"] = "linear_regression"
    name: str | None = None
    n: int = Field(ge=1)
    dims: int = Field(ge=1)
    noise_std: float = Field(ge=0.0, allow_inf_nan=False)
    seed: int = Field(ge=0, lt=2**64)

    def dataset_name(self) -> str:
        return self.name or f"linear_n{self.n}_d{self.dims}_s{self.seed}"


SyntheticSpec = Annotated[
    GaussianBlobsSpec | LinearRegressionSpec, Field(discriminator="kind")
]


class ManifestSource(BaseModel):
    """A dataset manifest, inline or as the path of a manifest YAML file."""

    manifest: DatasetManifest | Path

    @model_validator(mode="before")
    @classmethod
    def _path_or_mapping(cls, data: Any) -> Any:
        if isinstance(data, dict) and isinstance(data.get("manifest"), str):
            return {"manifest": Path(data["manifest"])}
        return data


class SyntheticSource(BaseModel):
    synthetic: SyntheticSpec


class BundledSource(BaseModel):
    """One of the CSV datasets shipped in the bundled datasets folder."""

    bundled: str


DatasetSource = ManifestSource | SyntheticSource | BundledSource
