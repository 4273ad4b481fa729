"""Drop probabilities, mean queue lengths and their aggregates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

from vnfchain.core.dtmc import SteadyState
from vnfchain.models.metrics import SystemMetrics

DropConvention = Literal["rate", "joint"]


@dataclass(frozen=True, slots=True)
class EffectiveRates:
    """Arrival probabilities ``lambda1..lambda5`` and service probabilities ``mu1..mu5``."""

    lam: tuple[float, float, float, float, float]
    mu: tuple[float, float, float, float, float]


def drop_probabilities(
    pi1: SteadyState,
    pi2: SteadyState,
    pi3: SteadyState,
    rates: EffectiveRates,
    *,
    convention: DropConvention = "rate",
) -> tuple[float, float, float, float, float]:
    """Expected dropped tasks per slot at Q1..Q5.

    ``rate`` weights the transmission-queue drops by the effective arrival rates
    lambda2 and lambda4; ``joint`` uses the tandem's own joint probability that the
    processing queue is busy, serves, and finds the transmission queue full.
    """

    if convention not in ("rate", "joint"):
        raise ValueError(f"unknown drop convention {convention!r}")
    lam1, lam2, lam3, lam4, lam5 = rates.lam
    mu1, mu2, mu3, mu4, mu5 = rates.mu
    joint1 = pi1.joint()
    joint2 = pi2.joint()

    d1 = lam1 * (1.0 - mu1) * float(joint1[-1, :].sum())
    d3 = lam3 * (1.0 - mu3) * float(joint2[-1, :].sum())
    full2 = float(joint1[1:, -1].sum())
    full4 = float(joint2[1:, -1].sum())
    if convention == "rate":
        d2 = lam2 * (1.0 - mu2) * full2
        d4 = lam4 * (1.0 - mu4) * full4
    else:
        d2 = mu1 * (1.0 - mu2) * full2
        d4 = mu3 * (1.0 - mu4) * full4
    d5 = lam5 * (1.0 - mu5) * pi3[len(pi3) - 1]
    return (d1, d2, d3, d4, d5)


def mean_lengths(
    pi1: SteadyState,
    pi2: SteadyState,
    pi3: SteadyState,
    q6mean: float | None,
) -> tuple[float, float, float, float, float, float | None]:
    return (
        pi1.expectation("level"),
        pi1.expectation("phase"),
        pi2.expectation("level"),
        pi2.expectation("phase"),
        pi3.expectation(),
        q6mean,
    )


def aggregate(drops: Sequence[float], means: Sequence[float | None], p: float) -> SystemMetrics:
    """System totals plus throughput ``p - P_D`` and Little's-law delay ``Qbar / throughput``."""

    drop_total = float(sum(drops))
    q6 = means[-1]
    mean_total = None if q6 is None else float(sum(m for m in means if m is not None))
    throughput = min(max(p - drop_total, 0.0), p)
    delay = mean_total / throughput if mean_total is not None and throughput > 0.0 else None
    return SystemMetrics(
        drop_per_queue=tuple(float(d) for d in drops),
        drop_total=drop_total,
        mean_len_per_queue=tuple(None if m is None else float(m) for m in means),
        mean_total=mean_total,
        throughput=throughput,
        delay=delay,
    )
