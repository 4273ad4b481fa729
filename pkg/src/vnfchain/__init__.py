"""Queueing analysis and simulation of a two-VNF service chain."""

from .analysis.pipeline import Analysis, analyze, analyze_detailed
from .models import SimConfig, SystemMetrics, SystemParams, validate
from .simulation import replicate, simulate

__all__ = [
    "Analysis",
    "SimConfig",
    "SystemMetrics",
    "SystemParams",
    "analyze",
    "analyze_detailed",
    "replicate",
    "simulate",
    "validate",
]
