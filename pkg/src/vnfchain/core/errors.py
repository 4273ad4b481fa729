"""Exception hierarchy shared by the analysis, simulation and CLI layers."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:  # pragma: no cover - mypy only
    from vnfchain.models.metrics import SystemMetrics


class VnfChainError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(VnfChainError, ValueError):
    """A system parameter violates its invariant."""

    def __init__(self, field: str, value: Any, reason: str) -> None:
        super().__init__(f"{field}={value!r}: {reason}")
        self.field = field
        self.value = value
        self.reason = reason


class ConfigError(VnfChainError):
    """The configuration document cannot be turned into parameters."""

    def __init__(self, message: str, *, key: str | None = None) -> None:
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


class NotStochasticError(VnfChainError, ValueError):
    def __init__(self, message: str, *, row: int | None = None) -> None:
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class ShapeError(VnfChainError, ValueError):
    pass


class SolverError(VnfChainError):
    """A steady-state solve failed or missed its residual tolerance."""

    def __init__(self, message: str, *, residual: float | None = None) -> None:
        super().__init__(message)
        self.residual = residual


class RepeatedPolesError(SolverError):
    pass


class TruncationError(SolverError):
    def __init__(self, message: str, *, tail_mass: float) -> None:
        super().__init__(message)
        self.tail_mass = tail_mass


class UnstableQueueError(VnfChainError):
    """Q6 is unstable: its total feed rate is not strictly below its service rate."""

    def __init__(
        self,
        lambda6: float,
        mu6: float,
        *,
        partial: "SystemMetrics | None" = None,
        upstream: Any = None,
    ) -> None:
        super().__init__(f"Q6 unstable: lambda6={lambda6:.6g} >= mu6={mu6:.6g}")
        self.lambda6 = lambda6
        self.mu6 = mu6
        self.partial = partial
        self.upstream = upstream


class SweepError(VnfChainError):
    pass
