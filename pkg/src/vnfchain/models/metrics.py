"""Metric containers shared by the analytical pipeline and the simulator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict

METRIC_COLUMNS: tuple[str, ...] = (
    "P_D1",
    "P_D2",
    "P_D3",
    "P_D4",
    "P_D5",
    "P_D",
    "Qbar1",
    "Qbar2",
    "Qbar3",
    "Qbar4",
    "Qbar5",
    "Qbar6",
    "Qbar",
    "throughput",
    "delay",
)


@dataclass(frozen=True, slots=True)
class SystemMetrics:
    """Per-queue and aggregate performance of the chain.

    Drop figures are expected dropped tasks per slot. ``throughput`` and ``delay`` are
    derived by flow accounting and Little's law and count in-network time (Q1..Q6) only.
    Entries that depend on Q6 are ``None`` when Q6 is unstable.
    """

    drop_per_queue: tuple[float, ...]
    drop_total: float
    mean_len_per_queue: tuple[float | None, ...]
    mean_total: float | None
    throughput: float
    delay: float | None

    @property
    def stable(self) -> bool:
        return self.mean_total is not None

    @property
    def q6_mean(self) -> float | None:
        return self.mean_len_per_queue[5]

    def to_record(self) -> Dict[str, Any]:
        """Flat mapping keyed by :data:`METRIC_COLUMNS`."""
        record: Dict[str, Any] = {}
        for index, value in enumerate(self.drop_per_queue, start=1):
            record[f"P_D{index}"] = value
        record["P_D"] = self.drop_total
        for index, value in enumerate(self.mean_len_per_queue, start=1):
            record[f"Qbar{index}"] = value
        record["Qbar"] = self.mean_total
        record["throughput"] = self.throughput
        record["delay"] = self.delay
        return record
