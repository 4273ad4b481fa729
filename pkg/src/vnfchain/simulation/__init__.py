"""Slot-level simulation of the chain."""

from .compare import ComparisonRow, compare
from .engine import simulate
from .replication import replicate
from .rng import StreamId

__all__ = ["ComparisonRow", "StreamId", "compare", "replicate", "simulate"]
