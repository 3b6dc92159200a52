"""Descriptive statistics used by the stopping rule and the harness.

Sums go through `math.fsum` after shifting every value by the first one, so a
constant sample has a mean equal to that value and exactly zero spread.
"""

import math
from collections.abc import Sequence

from scipy import stats


def _finite(xs: Sequence[float]) -> list[float]:
    values = [float(x) for x in xs]
    if not all(math.isfinite(x) for x in values):
        raise ValueError("statistics need finite values")
    return values


def running_mean(xs: Sequence[float]) -> float:
    values = _finite(xs)
    if not values:
        raise ValueError("mean of an empty sample")
    v0 = values[0]
    return v0 + math.fsum(x - v0 for x in values) / len(values)


def sample_std(xs: Sequence[float]) -> float:
    """Standard deviation with the n - 1 divisor."""
    values = _finite(xs)
    n = len(values)
    if n < 2:
        raise ValueError(f"sample standard deviation needs at least 2 values, got {n}")
    # shift by the first value so that equal inputs give exactly 0
    shifted = [x - values[0] for x in values]
    mean = math.fsum(shifted) / n
    return math.sqrt(math.fsum((x - mean) ** 2 for x in shifted) / (n - 1))


def student_t_quantile(p: float, df: int) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {p}")
    if df < 1:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    return float(stats.t.ppf(p, df))
