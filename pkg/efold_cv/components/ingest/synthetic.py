import logging

import numpy as np

from efold_cv.components.ingest.model import (
    GaussianBlobsSpec,
    LinearRegressionSpec,
    SyntheticSpec,
)
from efold_cv.core.model import Dataset, TaskKind

logger = logging.getLogger(__name__)

_CENTER_BOX = 5.0


def _blobs(spec: GaussianBlobsSpec) -> Dataset:
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    centers = rng.uniform(-_CENTER_BOX, _CENTER_BOX, size=(spec.classes, spec.dims))
    labels = np.repeat(np.arange(spec.classes), spec.per_class)
    noise = rng.standard_normal((labels.shape[0], spec.dims))
    return Dataset(
        name=spec.dataset_name(),
        features=centers[labels] + spec.spread * noise,
        target=labels,
        task=TaskKind.BINARY if spec.classes == 2 else TaskKind.MULTICLASS,
        class_count=spec.classes,
        metadata={"centers": centers.tolist(), "spread": spec.spread},
    )


def _linear(spec: LinearRegressionSpec) -> Dataset:
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    weights = rng.standard_normal(spec.dims)
    intercept = float(rng.standard_normal())
    X = rng.standard_normal((spec.n, spec.dims))
    y = X @ weights + intercept + spec.noise_std * rng.standard_normal(spec.n)
    return Dataset(
        name=spec.dataset_name(),
        features=X,
        target=y,
        task=TaskKind.REGRESSION,
        metadata={"weights": weights.tolist(), "intercept": intercept},
    )


def generate(spec: SyntheticSpec) -> Dataset:
    """Build a synthetic dataset; identical specs give identical datasets."""
    match spec:
        case GaussianBlobsSpec():
            dataset = _blobs(spec)
        case LinearRegressionSpec():
            dataset = _linear(spec)
    logger.debug(
        "Generated synthetic dataset name=%s rows=%s", dataset.name, dataset.n_rows
    )
    return dataset
