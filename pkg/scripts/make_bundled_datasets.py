"""Regenerate the bundled desk-scale datasets.

Every table is drawn from its own PCG64 stream and written with pandas,
three decimals per float. `--check` renders the tables again and reports
the files that differ from the ones on disk; the draws follow numpy's
stream guarantees, so a numpy upgrade that changes them shows up there.
"""

import argparse
import logging
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pandas as pd

from efold_cv.paths import bundled_datasets_path

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.3f"


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def iris_like() -> pd.DataFrame:
    rng = _rng(11)
    centers = np.array(
        [
            [5.0, 3.4, 1.5, 0.25],
            [5.9, 2.8, 4.3, 1.3],
            [6.5, 3.0, 5.2, 1.9],
        ]
    )
    spread = np.array([0.4, 0.35, 0.5, 0.3])
    names = ["setosa_like", "versicolor_like", "virginica_like"]
    features = np.repeat(centers, 50, axis=0) + spread * rng.standard_normal((150, 4))
    frame = pd.DataFrame(
        features, columns=["sepal_length", "sepal_width", "petal_length", "petal_width"]
    )
    frame["species"] = np.repeat(names, 50)
    return frame


def wine_like() -> pd.DataFrame:
    rng = _rng(23)
    cultivar = np.repeat(np.arange(3), [59, 71, 48])
    j = np.arange(13)
    means = ((j * 7 + cultivar[:, None] * 3) % 5) * 0.45
    features = means + rng.standard_normal((cultivar.size, 13))
    frame = pd.DataFrame(features, columns=[f"x{i:02d}" for i in j])
    frame["cultivar"] = cultivar + 1
    return frame


def cancer_like() -> pd.DataFrame:
    rng = _rng(37)
    malignant = np.repeat([0, 1], [357, 212])
    scale = np.arange(12) % 3 + 1
    features = scale * (malignant[:, None] * 0.55 + rng.standard_normal((malignant.size, 12)))
    frame = pd.DataFrame(features, columns=[f"f{i:02d}" for i in range(1, 13)])
    # benign rows come first, so encode_target maps B to 0
    frame["diagnosis"] = np.where(malignant == 1, "M", "B")
    return frame


def student_like() -> pd.DataFrame:
    rng = _rng(41)
    n = 400
    gender = np.where(rng.random(n) < 0.5, "F", "M")
    hours = 5 + 2 * rng.standard_normal(n)
    absences = rng.integers(0, 10, n)
    previous = 70 + 10 * rng.standard_normal(n)
    latent = 0.5 * hours - 0.3 * absences + 0.04 * previous + rng.standard_normal(n)
    grade = pd.cut(latent, [-np.inf, 3.2, 4.7, np.inf], labels=["low", "mid", "high"])
    return pd.DataFrame(
        {
            "StudentID": [f"S{i:04d}" for i in range(1, n + 1)],
            "gender": gender,
            "study_hours": hours,
            "absences": absences,
            "previous_score": previous,
            "grade": grade,
        }
    )


def era_like() -> pd.DataFrame:
    rng = _rng(53)
    x = rng.standard_normal((1000, 4))
    y = 2 * x[:, 0] - x[:, 1] + 0.5 * x[:, 2] + 3 + rng.standard_normal(1000)
    frame = pd.DataFrame(x, columns=[f"x{i}" for i in range(4)])
    frame["y"] = y
    return frame


GENERATORS: dict[str, Callable[[], pd.DataFrame]] = {
    "iris_like": iris_like,
    "wine_like": wine_like,
    "cancer_like": cancer_like,
    "student_like": student_like,
    "era_like": era_like,
}


def render(name: str) -> str:
    return GENERATORS[name]().to_csv(
        index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
    )


def stale_datasets(folder: Path) -> list[str]:
    return [
        name
        for name in GENERATORS
        if not (folder / f"{name}.csv").exists()
        or (folder / f"{name}.csv").read_text(encoding="utf-8") != render(name)
    ]


def write_datasets(folder: Path) -> None:
    folder.mkdir(parents=True, exist_ok=True)
    for name, generate in GENERATORS.items():
        path = folder / f"{name}.csv"
        generate().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info("Wrote dataset name=%s path=%s", name, path)


parser = argparse.ArgumentParser(prog="make_bundled_datasets.py")
parser.add_argument(
    "--folder",
    type=Path,
    default=bundled_datasets_path,
    help="Where the CSV files go, next to their manifests",
)
parser.add_argument(
    "--check",
    action=argparse.BooleanOptionalAction,
    default=False,
    help="Only compare the files on disk with a fresh rendering",
)

if __name__ == "__main__":
    args = parser.parse_args()
    if not args.check:
        write_datasets(args.folder)
    elif stale := stale_datasets(args.folder):
        raise SystemExit(f"out of date: {', '.join(stale)}")
