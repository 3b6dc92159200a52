from typing import Literal

from pydantic import BaseModel, Field

from efold_cv.core.model import EfoldConfig
from efold_cv.settings.settings_loader import load_active_settings


class RunSettings(BaseModel):
    env_name: str = Field(
        description="Name of the environment (prod, test, local...)"
    )
    output_dir: str = Field(
        description="Where run artifacts are written. "
        "It will be treated as an absolute path if it starts with /, "
        "otherwise relative to the project root."
    )
    workers: int = Field(
        4,
        ge=1,
        description=(
            "Size of the process pool that executes runs.\n"
            "Runs are independent, folds inside a run are always sequential.\n"
            "With 1, runs execute inline in the calling process.\n"
            "Do not set it higher than the number of cores of your CPU."
        ),
    )


class HarnessSettings(BaseModel):
    runs_per_combination: int = Field(
        100,
        ge=1,
        description="Runs per (dataset, learner) pair, each with a different fold "
        "assignment.",
    )
    mode: Literal["simulate", "early_stop"] = Field(
        "simulate",
        description=(
            "The run mode of the harness:\n"
            "If `simulate` - score all e_max folds, replay the stopping rule on the "
            "full trace and compare against the full cross-validation result.\n"
            "If `early_stop` - stop training at the fold the rule picks. No ground "
            "truth is available in this mode."
        ),
    )
    base_seed: int = Field(
        0, ge=0, lt=2**64, description="Root of the per-run seed derivation."
    )
    ci_level: float = Field(
        0.95, gt=0.0, lt=1.0, description="Confidence level of the t-interval."
    )
    ci_uses_standard_error: bool = Field(
        True,
        description="If true the interval is mean ± t * σ / √k, otherwise mean ± t * σ.",
    )


class DataSettings(BaseModel):
    bundled_datasets_folder: str = Field(
        description="Folder holding the bundled CSV datasets and their manifests. "
        "It will be treated as an absolute path if it starts with /"
    )


class Settings(BaseModel):
    run: RunSettings
    efold: EfoldConfig = Field(default_factory=EfoldConfig)
    harness: HarnessSettings = Field(default_factory=HarnessSettings)
    data: DataSettings


"""
This is visible just for DI or testing purposes.

Use dependency injection or `settings()` method instead.
"""
unsafe_settings = load_active_settings()

"""
This is visible just for DI or testing purposes.

Use dependency injection or `settings()` method instead.
"""
unsafe_typed_settings = Settings(**unsafe_settings)


def settings() -> Settings:
    """Get the current loaded settings from the DI container.

    Script code and module-level paths use this; components and services
    receive `Settings` through dependency injection instead.
    """
    from efold_cv.di import global_injector

    return global_injector.get(Settings)
