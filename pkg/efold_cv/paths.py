from pathlib import Path

from efold_cv.constants import PROJECT_ROOT_PATH
from efold_cv.settings.settings import settings


def absolute_or_from(path: str | Path, base: Path = PROJECT_ROOT_PATH) -> Path:
    """Resolve `path` against `base` unless it is already absolute."""
    candidate = Path(path)
    if candidate.is_absolute():
        return candidate
    return base / candidate


bundled_datasets_path: Path = absolute_or_from(settings().data.bundled_datasets_folder)
experiments_path: Path = PROJECT_ROOT_PATH / "experiments"
