"""Settings profiles.

`settings.yaml` is the `default` profile and is always loaded first. Further
profiles come from `EFOLD_PROFILES` (comma separated) and map to
`settings-<profile>.yaml` in the settings folder. Later profiles override
earlier ones key by key.
"""

import functools
import logging
import os
import sys
import typing
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from pydantic.v1.utils import deep_update, unique_list

from efold_cv.constants import PROJECT_ROOT_PATH
from efold_cv.core.errors import ConfigurationError
from efold_cv.settings.yaml import load_yaml_mapping

logger = logging.getLogger(__name__)

PROFILES_ENV = "EFOLD_PROFILES"
SETTINGS_FOLDER_ENV = "EFOLD_SETTINGS_FOLDER"
DEFAULT_PROFILE = "default"
TEST_PROFILE = "test"


def settings_folder(environ: typing.Mapping[str, str] = os.environ) -> Path:
    return Path(environ.get(SETTINGS_FOLDER_ENV, PROJECT_ROOT_PATH))


def profile_file(profile: str, folder: Path) -> Path:
    if profile == DEFAULT_PROFILE:
        return folder / "settings.yaml"
    return folder / f"settings-{profile}.yaml"


def available_profiles(folder: Path) -> list[str]:
    names = [p.stem.removeprefix("settings-") for p in folder.glob("settings-*.yaml")]
    return [DEFAULT_PROFILE, *sorted(names)]


def requested_profiles(
    environ: typing.Mapping[str, str] = os.environ, under_test: bool = False
) -> list[str]:
    from_env = [p.strip() for p in environ.get(PROFILES_ENV, "").split(",") if p.strip()]
    return unique_list(
        [DEFAULT_PROFILE, *from_env, *([TEST_PROFILE] if under_test else [])]
    )


# the test fixtures package is only imported by pytest
active_profiles: list[str] = requested_profiles(under_test="tests.fixtures" in sys.modules)


def merge_settings(settings: Iterable[dict[str, Any]]) -> dict[str, Any]:
    return functools.reduce(deep_update, settings, {})


def load_settings_from_profile(profile: str, folder: Path | None = None) -> dict[str, Any]:
    folder = folder or settings_folder()
    path = profile_file(profile, folder)
    if not path.exists():
        raise ConfigurationError(
            f"unknown settings profile '{profile}', no {path.name} in {folder}; "
            f"available: {', '.join(available_profiles(folder))}"
        )
    return load_yaml_mapping(path)


def load_active_settings(
    profiles: Iterable[str] | None = None, folder: Path | None = None
) -> dict[str, Any]:
    profiles = list(profiles or active_profiles)
    logger.debug("Loading settings with profiles=%s", profiles)
    return merge_settings(load_settings_from_profile(p, folder) for p in profiles)
