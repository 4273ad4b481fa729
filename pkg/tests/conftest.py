"""Test configuration: make ``src`` importable and share parameter fixtures."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"
for path in (PROJECT_ROOT, SRC_PATH):
    value = str(path)
    if value not in sys.path:
        sys.path.insert(0, value)

from vnfchain.models.system import SystemParams  # noqa: E402

CONFIGS_DIR = PROJECT_ROOT / "configs"


class StubLogger:
    """Records ``(severity, event, fields)`` instead of writing to a handler."""

    def __init__(self) -> None:
        self.events: list[tuple[str, str, dict]] = []

    def _record(self, severity: str, event: str, fields: dict) -> None:
        self.events.append((severity, event, fields))

    def log(self, event: str, *, severity: str = "info", message: str | None = None, **fields):
        self._record(severity, event, fields)

    def debug(self, event: str, **fields):
        self._record("debug", event, fields)

    def info(self, event: str, **fields):
        self._record("info", event, fields)

    def warning(self, event: str, **fields):
        self._record("warning", event, fields)

    def error(self, event: str, **fields):
        self._record("error", event, fields)

    def named(self, event: str) -> list[dict]:
        return [fields for _, name, fields in self.events if name == event]


@pytest.fixture
def stub_logger() -> StubLogger:
    return StubLogger()


@pytest.fixture
def fig3_params() -> SystemParams:
    """Drop-rate regime: mu3..mu5 = 0.5, mu6 = 0.9, p = 0.8, every buffer 10."""
    return SystemParams(
        p=0.8,
        alpha=0.5,
        mu=(0.5, 0.5, 0.5, 0.5, 0.5, 0.9),
        buffer=(10, 10, 10, 10, 10),
    )


@pytest.fixture
def fig5_params() -> SystemParams:
    """Trade-off regime: mu1..mu5 = 0.45, mu6 = 0.9, p = 0.8, every buffer 10."""
    return SystemParams.uniform(p=0.8, alpha=0.5, mu=0.45, mu6=0.9, capacity=10)


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS_DIR
