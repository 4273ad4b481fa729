"""Slot-accurate simulation of the six-queue chain.

Each slot follows the early-departure / late-arrival convention:

1. every non-empty queue completes one service with its own probability;
2. a task reaches the base station with probability ``p`` and is routed to Q1
   with probability ``alpha``, otherwise to Q3;
3. served tasks move to their successor (Q1->Q2, Q3->Q4, Q4->Q5, Q2->Q6, Q5->Q6;
   Q6 completions leave) and external tasks join Q1/Q3. A task that finds its
   target full after this slot's departures is dropped and charged to the target.

Uniforms are drawn in fixed blocks so a run depends only on (params, config, stream).
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from vnfchain.analysis.metrics import aggregate
from vnfchain.models.simulation import SimConfig, SimResult
from vnfchain.models.system import SystemParams, validate
from vnfchain.services.logging import StructuredLogger, get_logger
from vnfchain.services.telemetry import telemetry_span

from .rng import RNG_NAME, StreamId, make_generator

BLOCK_SLOTS = 65_536
UNIFORMS_PER_SLOT = 8


class _Counters:
    """Cumulative event counts since slot 0."""

    __slots__ = ("offered", "routed", "accepted", "dropped", "departures", "batches", "histograms", "q6_area")

    def __init__(self, caps: tuple[int, ...]) -> None:
        self.offered = 0
        self.routed = [0, 0]
        self.accepted = [0] * 6
        self.dropped = [0] * 5
        self.departures = [0] * 6
        self.batches = [0, 0, 0]
        self.histograms: list[list[int]] = [[0] * (cap + 1) for cap in caps] + [[0]]
        self.q6_area = 0

    def copy(self) -> "_Counters":
        other = _Counters.__new__(_Counters)
        other.offered = self.offered
        other.routed = list(self.routed)
        other.accepted = list(self.accepted)
        other.dropped = list(self.dropped)
        other.departures = list(self.departures)
        other.batches = list(self.batches)
        other.histograms = [list(h) for h in self.histograms]
        other.q6_area = self.q6_area
        return other


class _Network:
    __slots__ = ("queues", "caps", "q6_cap", "counters")

    def __init__(self, params: SystemParams, q6_cap: int | None) -> None:
        self.queues = [0] * 6
        self.caps = tuple(params.buffer)
        self.q6_cap = q6_cap
        self.counters = _Counters(self.caps)

    @property
    def occupancy(self) -> int:
        return sum(self.queues)


def _decisions(uniforms: NDArray[np.float64], mu: NDArray[np.float64], p: float, alpha: float) -> list[list[bool]]:
    serve = uniforms[:, :6] < mu
    columns = [serve[:, k].tolist() for k in range(6)]
    columns.append((uniforms[:, 6] < p).tolist())
    columns.append((uniforms[:, 7] < alpha).tolist())
    return columns


def _advance(net: _Network, columns: list[list[bool]], start: int, stop: int) -> None:
    q1, q2, q3, q4, q5, q6 = net.queues
    M1, M2, M3, M4, M5 = net.caps
    c = net.counters
    offered = c.offered
    to1, to3 = c.routed
    a1, a2, a3, a4, a5, a6 = c.accepted
    x1, x2, x3, x4, x5 = c.dropped
    e1, e2, e3, e4, e5, e6 = c.departures
    batches = c.batches
    h1, h2, h3, h4, h5, h6 = c.histograms
    area6 = c.q6_area
    cap6 = net.q6_cap if net.q6_cap is not None else -1
    size6 = len(h6)

    window = [column[start:stop] for column in columns]
    for s1, s2, s3, s4, s5, s6, arrive, route1 in zip(*window):
        d1 = s1 and q1 > 0
        d2 = s2 and q2 > 0
        d3 = s3 and q3 > 0
        d4 = s4 and q4 > 0
        d5 = s5 and q5 > 0
        d6 = s6 and q6 > 0
        if d1:
            q1 -= 1
            e1 += 1
        if d2:
            q2 -= 1
            e2 += 1
        if d3:
            q3 -= 1
            e3 += 1
        if d4:
            q4 -= 1
            e4 += 1
        if d5:
            q5 -= 1
            e5 += 1
        if d6:
            q6 -= 1
            e6 += 1

        if d1:
            if q2 < M2:
                q2 += 1
                a2 += 1
            else:
                x2 += 1
        if d3:
            if q4 < M4:
                q4 += 1
                a4 += 1
            else:
                x4 += 1
        if d4:
            if q5 < M5:
                q5 += 1
                a5 += 1
            else:
                x5 += 1
        batch = d2 + d5
        batches[batch] += 1
        if batch:
            q6 += batch
            a6 += batch
        if arrive:
            offered += 1
            if route1:
                to1 += 1
                if q1 < M1:
                    q1 += 1
                    a1 += 1
                else:
                    x1 += 1
            else:
                to3 += 1
                if q3 < M3:
                    q3 += 1
                    a3 += 1
                else:
                    x3 += 1

        h1[q1] += 1
        h2[q2] += 1
        h3[q3] += 1
        h4[q4] += 1
        h5[q5] += 1
        area6 += q6
        bin6 = cap6 if 0 <= cap6 < q6 else q6
        if bin6 >= size6:
            h6.extend([0] * (bin6 + 1 - size6))
            size6 = len(h6)
        h6[bin6] += 1

    net.queues = [q1, q2, q3, q4, q5, q6]
    c.offered = offered
    c.routed = [to1, to3]
    c.accepted = [a1, a2, a3, a4, a5, a6]
    c.dropped = [x1, x2, x3, x4, x5]
    c.departures = [e1, e2, e3, e4, e5, e6]
    c.q6_area = area6


def _window(end: _Counters, start: _Counters) -> _Counters:
    out = end.copy()
    out.offered -= start.offered
    out.routed = [a - b for a, b in zip(end.routed, start.routed)]
    out.accepted = [a - b for a, b in zip(end.accepted, start.accepted)]
    out.dropped = [a - b for a, b in zip(end.dropped, start.dropped)]
    out.departures = [a - b for a, b in zip(end.departures, start.departures)]
    out.batches = [a - b for a, b in zip(end.batches, start.batches)]
    histograms = []
    for after, before in zip(end.histograms, start.histograms):
        padded = before + [0] * (len(after) - len(before))
        histograms.append([a - b for a, b in zip(after, padded)])
    out.histograms = histograms
    out.q6_area -= start.q6_area
    return out


def simulate(
    params: SystemParams,
    cfg: SimConfig,
    *,
    stream: StreamId | None = None,
    logger: StructuredLogger | None = None,
) -> SimResult:
    """Run one simulation and report statistics over slots ``warmup..slots-1``."""

    validate(params)
    log = logger or get_logger("vnfchain.simulation")
    stream_id = stream or StreamId(seed=cfg.seed)
    generator = make_generator(stream_id)
    mu = np.asarray(params.mu, dtype=float)
    net = _Network(params, cfg.q6_cap)
    baseline: _Counters | None = None
    initial_occupancy = 0

    with telemetry_span(log, "simulate.run", stream=stream_id.describe(), slots=cfg.slots) as span:
        done = 0
        while done < cfg.slots:
            uniforms = generator.random((BLOCK_SLOTS, UNIFORMS_PER_SLOT))
            count = min(BLOCK_SLOTS, cfg.slots - done)
            columns = _decisions(uniforms[:count], mu, params.p, params.alpha)
            split = cfg.warmup - done
            if 0 < split < count:
                _advance(net, columns, 0, split)
                baseline, initial_occupancy = net.counters.copy(), net.occupancy
                _advance(net, columns, split, count)
            else:
                if split == 0:
                    baseline, initial_occupancy = net.counters.copy(), net.occupancy
                _advance(net, columns, 0, count)
            done += count
        assert baseline is not None
        result = _build_result(params, cfg, _window(net.counters, baseline), initial_occupancy, net.occupancy, stream_id)
        span.record(drop_total=result.metrics.drop_total, mean_total=result.metrics.mean_total)
    if result.accounting_residual != 0:
        log.error("simulate.accounting_mismatch", residual=result.accounting_residual)
    log.info(
        "simulate.run.complete",
        stream=stream_id.describe(),
        slots=cfg.slots,
        drop_total=result.metrics.drop_total,
        mean_total=result.metrics.mean_total,
    )
    return result


def _build_result(
    params: SystemParams,
    cfg: SimConfig,
    counts: _Counters,
    initial_occupancy: int,
    final_occupancy: int,
    stream: StreamId,
) -> SimResult:
    slots = cfg.measured_slots
    histograms = tuple(np.asarray(h, dtype=np.int64) for h in counts.histograms)
    means: list[float | None] = [
        float(np.arange(h.size) @ h) / slots for h in histograms[:5]
    ]
    means.append(counts.q6_area / slots)
    drops = [x / slots for x in counts.dropped]
    metrics = aggregate(drops, means, counts.offered / slots)
    return SimResult(
        params=params,
        config=cfg,
        metrics=metrics,
        offered=counts.offered,
        routed=(counts.routed[0], counts.routed[1]),
        accepted=tuple(counts.accepted),
        dropped=tuple(counts.dropped),
        departures=tuple(counts.departures),
        histograms=histograms,
        q6_batches=(counts.batches[0], counts.batches[1], counts.batches[2]),
        initial_occupancy=initial_occupancy,
        final_occupancy=final_occupancy,
        rng=RNG_NAME,
        stream=stream.describe(),
    )
