"""Span instrumentation for solves, simulation runs and sweeps."""

from __future__ import annotations

import contextlib
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator

from .logging import StructuredLogger


@dataclass
class TelemetrySpan:
    """Data captured for a single span."""

    name: str
    start_time: float
    metadata: Dict[str, Any]
    duration_ms: int | None = None
    results: Dict[str, Any] = field(default_factory=dict)

    def record(self, **values: Any) -> None:
        """Attach result fields that are logged with the finish event."""
        self.results.update(values)


@contextlib.contextmanager
def telemetry_span(
    logger: StructuredLogger,
    name: str,
    *,
    expected: tuple[type[Exception], ...] = (),
    **metadata: Any,
) -> Iterator[TelemetrySpan]:
    """Context manager that logs span lifecycle events.

    Exceptions listed in ``expected`` are outcomes the caller reports itself, so their
    ``telemetry.span.error`` record is logged at debug instead of error.
    """

    start = time.perf_counter()
    logger.debug("telemetry.span.start", span=name, **metadata)
    span = TelemetrySpan(name=name, start_time=start, metadata=metadata)
    try:
        yield span
    except Exception as error:
        severity = "debug" if isinstance(error, expected) else "error"
        logger.log("telemetry.span.error", severity=severity, span=name, error=str(error), **metadata)
        raise
    finally:
        span.duration_ms = int((time.perf_counter() - start) * 1000)
        logger.debug(
            "telemetry.span.finish",
            span=name,
            duration_ms=span.duration_ms,
            **{**metadata, **span.results},
        )
