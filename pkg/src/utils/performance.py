"""
Timing and parallel-map utilities for sweeps and Monte Carlo sessions.
"""
import time
import threading
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Callable, Deque, Dict, List, Optional, Sequence, TypeVar

import psutil

from .logger import logger
from .exceptions import ConfigurationError

T = TypeVar("T")
R = TypeVar("R")

MB = 1024 * 1024


@dataclass(frozen=True)
class TimingRecord:
    """Wall time and resident-memory change of one timed block."""
    operation: str
    seconds: float
    rss_delta_mb: float
    finished_at: float


class TimingLog:
    """Bounded, thread-safe history of timed blocks."""

    def __init__(self, max_records: int = 1000):
        self._records: Deque[TimingRecord] = deque(maxlen=max_records)
        self._lock = threading.Lock()

    def add(self, record: TimingRecord) -> None:
        with self._lock:
            self._records.append(record)

    def records(self, operation: Optional[str] = None) -> List[TimingRecord]:
        with self._lock:
            return [r for r in self._records if operation is None or r.operation == operation]

    def summary(self, operation: Optional[str] = None) -> Dict[str, Any]:
        """
        Count and wall-time statistics of the recorded blocks.

        Args:
            operation: Restrict to one operation name

        Returns:
            Dictionary with count, total/mean/max/min seconds; empty if nothing matched
        """
        seconds = [r.seconds for r in self.records(operation)]
        if not seconds:
            return {}
        return {
            "count": len(seconds),
            "total_seconds": sum(seconds),
            "mean_seconds": sum(seconds) / len(seconds),
            "max_seconds": max(seconds),
            "min_seconds": min(seconds),
        }

    def clear(self) -> None:
        with self._lock:
            self._records.clear()


# Global timing log
timing_log = TimingLog()


@contextmanager
def performance_context(operation_name: str):
    """
    Time a block of work and log it at INFO.

    The block is recorded in ``timing_log`` even when it raises.

    Args:
        operation_name: Name under which the block is logged and recorded
    """
    process = psutil.Process()
    rss_before = process.memory_info().rss
    start = time.perf_counter()
    try:
        yield
    finally:
        record = TimingRecord(
            operation=operation_name,
            seconds=time.perf_counter() - start,
            rss_delta_mb=(process.memory_info().rss - rss_before) / MB,
            finished_at=time.time(),
        )
        timing_log.add(record)
        logger.info(f"{operation_name} took {record.seconds:.2f}s, memory {record.rss_delta_mb:+.1f}MB")


class BatchProcessor:
    """Order-preserving map over independent work items."""

    def __init__(self, max_workers: int = 1):
        """
        Args:
            max_workers: Worker threads; 1 runs the items inline
        """
        if max_workers < 1:
            raise ConfigurationError(f"max_workers must be >= 1, got {max_workers}")
        self.max_workers = max_workers

    def map(self, process_func: Callable[[T], R], items: Sequence[T]) -> List[R]:
        """
        Apply ``process_func`` to every item.

        Results come back in the order of ``items`` whatever the worker
        count, so callers can combine them deterministically.

        Args:
            process_func: Function applied to each item
            items: Work items

        Returns:
            List of results aligned with ``items``
        """
        if not items:
            return []

        if self.max_workers == 1 or len(items) == 1:
            return [process_func(item) for item in items]

        workers = min(self.max_workers, len(items))
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(process_func, item) for item in items]
            try:
                return [future.result() for future in futures]
            except Exception as e:
                logger.error(f"Batch of {len(items)} items failed: {e}")
                raise
