"""Data contracts shared by analysis, simulation and the CLI."""

from .metrics import METRIC_COLUMNS, SystemMetrics
from .simulation import ReplicationSummary, SimConfig, SimResult
from .system import FINITE_QUEUES, ROUTE_1, ROUTE_2, QueueId, SystemParams, validate

__all__ = [
    "FINITE_QUEUES",
    "METRIC_COLUMNS",
    "ROUTE_1",
    "ROUTE_2",
    "QueueId",
    "ReplicationSummary",
    "SimConfig",
    "SimResult",
    "SystemMetrics",
    "SystemParams",
    "validate",
]
