"""Data contracts for simulation runs and replications."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np
from numpy.typing import NDArray

from .metrics import SystemMetrics
from .system import SystemParams

DEFAULT_SLOTS = 1_000_000
DEFAULT_WARMUP = 10_000
DEFAULT_SEED = 20190417


@dataclass(frozen=True, slots=True)
class SimConfig:
    """Run length, statistics window and seed of one simulation.

    ``q6_cap`` only bounds the Q6 occupancy histogram (larger states share the last
    bin); the queue itself stays unbounded.
    """

    slots: int = DEFAULT_SLOTS
    warmup: int = DEFAULT_WARMUP
    seed: int = DEFAULT_SEED
    q6_cap: int | None = None

    def __post_init__(self) -> None:
        if self.slots < 1:
            raise ValueError(f"slots must be positive, got {self.slots}")
        if self.warmup < 0:
            raise ValueError(f"warmup must be non-negative, got {self.warmup}")
        if not self.warmup < self.slots:
            raise ValueError(f"warmup ({self.warmup}) must be smaller than slots ({self.slots})")
        if self.q6_cap is not None and self.q6_cap < 1:
            raise ValueError(f"q6_cap must be positive, got {self.q6_cap}")

    @property
    def measured_slots(self) -> int:
        return self.slots - self.warmup


@dataclass(frozen=True, slots=True)
class SimResult:
    """Empirical metrics and exact event counts over the measurement window.

    ``offered`` counts tasks received by the base station. Queue-indexed tuples run
    over Q1..Q6 (``dropped`` over Q1..Q5).
    """

    params: SystemParams
    config: SimConfig
    metrics: SystemMetrics
    offered: int
    routed: tuple[int, int]
    accepted: tuple[int, ...]
    dropped: tuple[int, ...]
    departures: tuple[int, ...]
    histograms: tuple[NDArray[np.int64], ...]
    q6_batches: tuple[int, int, int]
    initial_occupancy: int
    final_occupancy: int
    rng: str
    stream: str

    @property
    def measured_slots(self) -> int:
        return self.config.measured_slots

    @property
    def system_departures(self) -> int:
        return self.departures[5]

    @property
    def total_drops(self) -> int:
        return sum(self.dropped)

    @property
    def accounting_residual(self) -> int:
        """``initial + offered - departures - drops - final``; zero for every run."""
        return (
            self.initial_occupancy
            + self.offered
            - self.system_departures
            - self.total_drops
            - self.final_occupancy
        )

    def departure_rate(self, queue: int) -> float:
        return self.departures[queue - 1] / self.measured_slots

    def batch_distribution(self) -> tuple[float, float, float]:
        total = float(sum(self.q6_batches))
        n0, n1, n2 = self.q6_batches
        return (n0 / total, n1 / total, n2 / total)

    def occupancy_distribution(self, queue: int) -> NDArray[np.float64]:
        counts = self.histograms[queue - 1]
        return counts / counts.sum()

    def to_record(self) -> Dict[str, Any]:
        record = self.metrics.to_record()
        record.update(
            {
                "offered": self.offered,
                "drops": self.total_drops,
                "departures": self.system_departures,
                "final_occupancy": self.final_occupancy,
                "accounting_residual": self.accounting_residual,
            }
        )
        return record


@dataclass(frozen=True, slots=True)
class ReplicationSummary:
    """Independent runs with per-metric mean, sample standard deviation and 95% CI half-width."""

    runs: tuple[SimResult, ...]
    mean: Dict[str, float]
    std: Dict[str, float]
    ci_half_width: Dict[str, float]
    confidence: float = 0.95
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_runs(self) -> int:
        return len(self.runs)
