"""System parameters and the fixed six-queue topology."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Literal

from vnfchain.core.errors import ParameterError

QueueRole = Literal["processing", "transmission"]

MU_COUNT = 6
BUFFER_COUNT = 5


class QueueId(enum.IntEnum):
    """Queue index with its role in the chain.

    Q1, Q4 and Q6 host VNF processing; Q2, Q3 and Q5 forward tasks to the next server.
    """

    Q1 = 1
    Q2 = 2
    Q3 = 3
    Q4 = 4
    Q5 = 5
    Q6 = 6

    @property
    def role(self) -> QueueRole:
        return "transmission" if self in _TRANSMISSION else "processing"

    @property
    def successor(self) -> "QueueId | None":
        return SUCCESSOR[self]

    @property
    def finite(self) -> bool:
        return self is not QueueId.Q6


_TRANSMISSION = frozenset({QueueId.Q2, QueueId.Q3, QueueId.Q5})

ROUTE_1: tuple[QueueId, ...] = (QueueId.Q1, QueueId.Q2, QueueId.Q6)
ROUTE_2: tuple[QueueId, ...] = (QueueId.Q3, QueueId.Q4, QueueId.Q5, QueueId.Q6)

SUCCESSOR: dict[QueueId, QueueId | None] = {
    QueueId.Q1: QueueId.Q2,
    QueueId.Q2: QueueId.Q6,
    QueueId.Q3: QueueId.Q4,
    QueueId.Q4: QueueId.Q5,
    QueueId.Q5: QueueId.Q6,
    QueueId.Q6: None,
}

FINITE_QUEUES: tuple[QueueId, ...] = tuple(q for q in QueueId if q.finite)


@dataclass(frozen=True, slots=True)
class SystemParams:
    """Full parameterization of the chain.

    ``mu`` holds the per-slot service probabilities of Q1..Q6 and ``buffer`` the
    capacities of Q1..Q5; Q6 is unbounded.
    """

    p: float
    alpha: float
    mu: tuple[float, ...]
    buffer: tuple[int, ...]

    def mu_of(self, queue: QueueId | int) -> float:
        return self.mu[int(queue) - 1]

    def capacity_of(self, queue: QueueId | int) -> int:
        index = int(queue)
        if index == QueueId.Q6:
            raise KeyError("Q6 has no capacity")
        return self.buffer[index - 1]

    @property
    def lambda1(self) -> float:
        return self.p * self.alpha

    @property
    def lambda3(self) -> float:
        return self.p * (1.0 - self.alpha)

    def replace(self, **changes: object) -> "SystemParams":
        return dataclasses.replace(self, **changes)  # type: ignore[arg-type]

    def with_alpha(self, alpha: float) -> "SystemParams":
        return dataclasses.replace(self, alpha=alpha)

    def as_flat_dict(self) -> dict[str, float | int]:
        """Flat ``p, alpha, mu1..mu6, M1..M5`` mapping, the config-file key set."""
        data: dict[str, float | int] = {"p": self.p, "alpha": self.alpha}
        data.update({f"mu{i}": value for i, value in enumerate(self.mu, start=1)})
        data.update({f"M{i}": value for i, value in enumerate(self.buffer, start=1)})
        return data

    @classmethod
    def uniform(
        cls,
        *,
        p: float,
        alpha: float,
        mu: float,
        mu6: float,
        capacity: int,
    ) -> "SystemParams":
        """Every finite queue shares ``mu`` and ``capacity``; Q6 serves at ``mu6``."""
        return cls(p=p, alpha=alpha, mu=(mu,) * BUFFER_COUNT + (mu6,), buffer=(capacity,) * BUFFER_COUNT)


def _check_probability(field: str, value: object, *, allow_zero: bool = True) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(field, value, "must be a real number")
    number = float(value)
    if math.isnan(number):
        raise ParameterError(field, value, "must not be NaN")
    if allow_zero:
        if not 0.0 <= number <= 1.0:
            raise ParameterError(field, value, "must lie in [0, 1]")
    elif not 0.0 < number <= 1.0:
        raise ParameterError(field, value, "must lie in (0, 1]")


def validate(params: SystemParams) -> SystemParams:
    """Return ``params`` unchanged when every invariant holds.

    Fields are checked in declaration order (p, alpha, mu1..mu6, M1..M5) and the first
    violation is raised as :class:`ParameterError` naming the field.
    """

    _check_probability("p", params.p)
    _check_probability("alpha", params.alpha)
    if len(params.mu) != MU_COUNT:
        raise ParameterError("mu", params.mu, f"expected {MU_COUNT} service probabilities")
    for index, value in enumerate(params.mu, start=1):
        _check_probability(f"mu{index}", value, allow_zero=False)
    if len(params.buffer) != BUFFER_COUNT:
        raise ParameterError("buffer", params.buffer, f"expected {BUFFER_COUNT} capacities")
    for index, value in enumerate(params.buffer, start=1):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParameterError(f"M{index}", value, "must be an integer")
        if value < 1:
            raise ParameterError(f"M{index}", value, "must be at least 1")
    return params
