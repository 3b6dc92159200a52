import logging
import time
from collections import deque
from collections.abc import Iterable, Iterator

import numpy as np

from efold_cv.utils.typing import T

logger = logging.getLogger(__name__)


def human_time(seconds: float) -> str:
    # millisecond precision below 2 seconds
    if seconds < 2:
        return f"{seconds * 1000:.0f}ms"
    remaining = int(seconds)
    parts = []
    for unit, size in (("d", 86400), ("h", 3600), ("m", 60), ("s", 1)):
        n, remaining = divmod(remaining, size)
        if n:
            parts.append(f"{n}{unit}")
    return " ".join(parts)


class RunProgress:
    """Estimate the time left from a line fitted to recent completions."""

    def __init__(self, total: int, window: int = 100) -> None:
        self.total = total
        self.rate = 0.0  # runs per second
        self._samples: deque[tuple[float, int]] = deque(maxlen=window)
        self._next_report = 0.0

    def update(self, done: int) -> None:
        if not 0 < done <= self.total:
            raise ValueError(f"progress {done} outside 1..{self.total}")
        self._samples.append((time.monotonic(), done))

    def start(self, first: float) -> None:
        self._next_report = time.monotonic() + first

    def due(self, every: float) -> bool:
        now = time.monotonic()
        if now >= self._next_report:
            self._next_report = now + every
            return True
        return False

    def seconds_left(self) -> float | None:
        if len(self._samples) < 3:
            return None
        times, counts = np.array(self._samples, dtype=np.float64).T
        if np.ptp(times) == 0.0:
            return None
        slope, _ = np.polyfit(times - times[0], counts, 1)
        if slope <= 0.0:
            return None
        self.rate = float(slope)
        return float((self.total - counts[-1]) / slope)

    def describe(self) -> str:
        left = self.seconds_left()
        if left is None:
            return "(computing)"
        return f"{human_time(left)} @ {self.rate * 60:.0f} runs/min"


def track(
    items: Iterable[T],
    total: int,
    label: str = "runs",
    first: float = 30.0,
    every: float = 60.0,
) -> Iterator[T]:
    """Yield `items` unchanged, logging an ETA after `first` seconds, then every `every`."""
    progress = RunProgress(total)
    progress.start(first)
    done = 0
    for done, item in enumerate(items, start=1):
        yield item
        progress.update(done)
        if progress.due(every):
            logger.info("%s %s/%s - ETA %s", label, done, total, progress.describe())
    logger.info("%s %s/%s done", label, done, total)
