"""Structured logging utilities with human and JSON console formats."""

from __future__ import annotations

import datetime as _dt
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict

LOG_FORMAT_ENV = "VNFCHAIN_LOG_FORMAT"
LOG_LEVEL_ENV = "VNFCHAIN_LOG_LEVEL"
DISABLE_CONSOLE_ENV = "VNFCHAIN_DISABLE_CONSOLE_LOGS"
DEFAULT_COMPONENT = "vnfchain"


@dataclass(slots=True)
class _RunContext:
    run_id: str | None = None
    command: str | None = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def as_fields(self) -> Dict[str, Any]:
        fields: Dict[str, Any] = dict(self.extra)
        if self.run_id is not None:
            fields["run_id"] = self.run_id
        if self.command is not None:
            fields["command"] = self.command
        return fields

    def clear(self) -> None:
        self.run_id = None
        self.command = None
        self.extra.clear()


# one context per process, merged into the records of every logger
_RUN_CONTEXT = _RunContext()


@dataclass
class LogEvent:
    """Structured payload emitted by the package."""

    event: str
    severity: str = "info"
    component: str = DEFAULT_COMPONENT
    message: str | None = None
    fields: Dict[str, Any] | None = None

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat().replace("+00:00", "Z"),
            "event": self.event,
            "severity": self.severity,
            "component": self.component,
        }
        if self.message:
            payload["message"] = self.message
        if self.fields:
            payload.update(self.fields)
        return payload


class StructuredLogger:
    """Dotted-event logger writing to a standard :mod:`logging` logger.

    Records are rendered as ``human`` text, ``json`` lines or ``both`` depending on
    ``VNFCHAIN_LOG_FORMAT``.
    """

    def __init__(self, name: str = DEFAULT_COMPONENT, *, component: str | None = None) -> None:
        self._logger = logging.getLogger(name)
        # handler and level live on the top-level logger; dotted children propagate to it
        root = logging.getLogger(name.split(".", 1)[0])
        if not root.handlers:
            handler = logging.StreamHandler()
            handler.setFormatter(logging.Formatter("%(message)s"))
            root.addHandler(handler)
            root.setLevel(self._level_from_environment())
        self._root = root
        self._component = component or name
        self._console_enabled = os.getenv(DISABLE_CONSOLE_ENV, "0") != "1"
        self._console_format = os.getenv(LOG_FORMAT_ENV, "human").lower()

    @property
    def name(self) -> str:
        return self._logger.name

    def log(self, event: str, *, severity: str = "info", message: str | None = None, **fields: Any) -> None:
        merged = _RUN_CONTEXT.as_fields()
        merged.update(fields)
        payload = LogEvent(
            event=event,
            severity=severity,
            component=self._component,
            message=message,
            fields=merged,
        )
        self._emit(payload)

    def debug(self, event: str, **fields: Any) -> None:
        self.log(event, severity="debug", **fields)

    def info(self, event: str, **fields: Any) -> None:
        self.log(event, severity="info", **fields)

    def warning(self, event: str, **fields: Any) -> None:
        self.log(event, severity="warning", **fields)

    def error(self, event: str, **fields: Any) -> None:
        self.log(event, severity="error", **fields)

    # ------------------------------------------------------------------ context configuration
    def bind(self, *, run_id: str | None = None, command: str | None = None, **extra: Any) -> None:
        """Bind fields to the process-wide run context seen by every logger."""
        if run_id is not None:
            _RUN_CONTEXT.run_id = run_id
        if command is not None:
            _RUN_CONTEXT.command = command
        _RUN_CONTEXT.extra.update(extra)

    def clear_context(self) -> None:
        _RUN_CONTEXT.clear()

    def set_level(self, level: int | str) -> None:
        """Set the level on the top-level logger shared by every dotted child."""
        self._root.setLevel(level if isinstance(level, int) else self._severity_to_level(level))

    # ------------------------------------------------------------------ internals
    def _emit(self, event: LogEvent) -> None:
        if not self._console_enabled:
            return
        level = self._severity_to_level(event.severity)
        if not self._logger.isEnabledFor(level):
            return
        record = event.to_dict()
        fmt = self._console_format
        if fmt in {"json", "both"}:
            self._logger.log(level, json.dumps(record, default=str))
        if fmt != "json":
            self._logger.log(level, self._format_human(record))

    @staticmethod
    def _level_from_environment() -> int:
        return StructuredLogger._severity_to_level(os.getenv(LOG_LEVEL_ENV, "warning"))

    @staticmethod
    def _severity_to_level(severity: str) -> int:
        mapping = {
            "debug": logging.DEBUG,
            "info": logging.INFO,
            "warning": logging.WARNING,
            "error": logging.ERROR,
            "critical": logging.CRITICAL,
        }
        return mapping.get(severity.lower(), logging.INFO)

    def _format_human(self, record: Dict[str, Any]) -> str:
        data = dict(record)
        timestamp = data.pop("timestamp", "-")
        event = data.pop("event", "unknown")
        severity = data.pop("severity", "info").upper()
        component = data.pop("component", "")
        message = data.pop("message", None)
        fields = " ".join(
            f"{key}={self._format_field_value(value)}" for key, value in sorted(data.items())
        )
        parts = [f"[{timestamp}]", severity, event]
        if component:
            parts.append(f"({component})")
        if message:
            parts.append(f"- {message}")
        if fields:
            parts.append(f"- {fields}")
        return " ".join(part for part in parts if part)

    @staticmethod
    def _format_field_value(value: Any) -> str:
        if isinstance(value, bool):
            return str(value).lower()
        if isinstance(value, float):
            return f"{value:.6g}"
        return str(value)


_LOGGERS: Dict[str, StructuredLogger] = {}


def get_logger(name: str = DEFAULT_COMPONENT) -> StructuredLogger:
    """Shared logger per dotted name, children of the ``vnfchain`` logger."""
    logger = _LOGGERS.get(name)
    if logger is None:
        logger = StructuredLogger(name)
        _LOGGERS[name] = logger
    return logger
