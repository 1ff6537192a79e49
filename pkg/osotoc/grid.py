"""Deterministic evaluation of a function over a time grid."""

import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from osotoc.logging import get_logger

logger = get_logger()

THREADS_ENV = "OSOTOC_THREADS"
SEQUENTIAL_THRESHOLD = 4

T = TypeVar("T")


def resolve_workers(threads: Optional[int] = None) -> int:
    """Worker count from an explicit value, then OSOTOC_THREADS, then 1."""
    if threads is not None:
        if threads < 1:
            raise ValueError("thread count must be at least 1")
        return threads
    raw = os.environ.get(THREADS_ENV)
    if raw is None or not raw.strip():
        return 1
    try:
        value = int(raw)
    except ValueError:
        logger.warning_with_fields(
            "Ignoring non-integer thread count",
            operation="resolve_workers",
            variable=THREADS_ENV,
            value=raw,
        )
        return 1
    if value < 1:
        return os.cpu_count() or 1
    return value


def evaluate_grid(
    func: Callable[[float], T],
    times: Sequence[float],
    workers: Optional[int] = None,
    label: str = "grid",
) -> List[T]:
    """Evaluate `func` at every time, returning results in grid order.

    Each point is computed independently, so the output does not depend on
    the worker count.
    """
    count = resolve_workers(workers)
    start_time = time.perf_counter()

    if count == 1 or len(times) < SEQUENTIAL_THRESHOLD:
        logger.debug_with_fields(
            "Using sequential evaluation",
            operation="evaluate_grid",
            label=label,
            mode="sequential",
            points=len(times),
        )
        results = [func(t) for t in times]
    else:
        threads = min(count, len(times))
        logger.debug_with_fields(
            "Using parallel evaluation",
            operation="evaluate_grid",
            label=label,
            mode="parallel",
            worker_count=threads,
            points=len(times),
        )
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(func, times))

    logger.info_with_fields(
        "Grid evaluation completed",
        operation="evaluate_grid",
        label=label,
        points=len(times),
        elapsed_time=time.perf_counter() - start_time,
    )
    return results
