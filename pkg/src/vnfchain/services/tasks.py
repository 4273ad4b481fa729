"""Process-pool helpers used by sweeps, regions and replications."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

from vnfchain.core.errors import ConfigError

from . import telemetry
from .logging import StructuredLogger, get_logger

JOBS_ENV_VAR = "VNFCHAIN_JOBS"

T = TypeVar("T")
R = TypeVar("R")


def default_jobs() -> int:
    raw = os.getenv(JOBS_ENV_VAR)
    if raw is None or not raw.strip():
        return 1
    try:
        jobs = int(raw)
    except ValueError as error:
        raise ConfigError(f"expected an integer, got {raw!r}", key=JOBS_ENV_VAR) from error
    return resolve_jobs(jobs)


def resolve_jobs(jobs: int | None) -> int:
    """``None`` reads ``VNFCHAIN_JOBS``; ``0`` means one worker per CPU."""

    if jobs is None:
        return default_jobs()
    if jobs < 0:
        raise ConfigError(f"must be non-negative, got {jobs}", key="jobs")
    if jobs == 0:
        return os.cpu_count() or 1
    return jobs


def parallel_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    *,
    jobs: int | None = None,
    name: str = "tasks.map",
    logger: StructuredLogger | None = None,
) -> list[R]:
    """Apply ``fn`` to every item, returning results in input order.

    With one worker the map runs in-process; otherwise ``fn`` and the items must
    be picklable.
    """

    log = logger or get_logger("vnfchain.services.tasks")
    work: Sequence[T] = list(items)
    workers = min(resolve_jobs(jobs), max(len(work), 1))
    with telemetry.telemetry_span(log, name, items=len(work), jobs=workers):
        if workers <= 1:
            return [fn(item) for item in work]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, work))
