"""Logging, telemetry, configuration, reports and parallel execution."""
