"""Independent replications with Student-t confidence intervals."""

from __future__ import annotations

import math

import pandas as pd
from scipy import stats

from vnfchain.models.metrics import METRIC_COLUMNS
from vnfchain.models.simulation import ReplicationSummary, SimConfig, SimResult
from vnfchain.models.system import SystemParams, validate
from vnfchain.services.logging import StructuredLogger, get_logger
from vnfchain.services.tasks import parallel_map
from vnfchain.services.telemetry import telemetry_span

from .engine import simulate
from .rng import RNG_NAME, StreamId, replication_streams

CONFIDENCE = 0.95


def _run(job: tuple[SystemParams, SimConfig, StreamId]) -> SimResult:
    params, cfg, stream = job
    return simulate(params, cfg, stream=stream)


def summarize(runs: list[SimResult], *, confidence: float = CONFIDENCE) -> ReplicationSummary:
    """Per-metric mean, sample standard deviation and CI half-width across runs.

    Metrics that are undefined in some run (``delay`` with no traffic) come out NaN.
    """

    n = len(runs)
    if n < 2:
        raise ValueError(f"at least two runs are needed for a confidence interval, got {n}")
    frame = pd.DataFrame([run.metrics.to_record() for run in runs], columns=list(METRIC_COLUMNS))
    frame = frame.astype(float)
    mean = frame.mean(skipna=False)
    std = frame.std(ddof=1, skipna=False)
    quantile = float(stats.t.ppf(0.5 + confidence / 2.0, df=n - 1))
    half_width = std * quantile / math.sqrt(n)
    return ReplicationSummary(
        runs=tuple(runs),
        mean={k: float(v) for k, v in mean.items()},
        std={k: float(v) for k, v in std.items()},
        ci_half_width={k: float(v) for k, v in half_width.items()},
        confidence=confidence,
        extra={
            "rng": RNG_NAME,
            "seed": runs[0].config.seed,
            "streams": [run.stream for run in runs],
            "accounting_residual": sum(abs(run.accounting_residual) for run in runs),
        },
    )


def replicate(
    params: SystemParams,
    cfg: SimConfig,
    n_runs: int,
    *,
    jobs: int | None = None,
    logger: StructuredLogger | None = None,
) -> ReplicationSummary:
    """Run ``n_runs`` simulations on the child streams of ``cfg.seed``."""

    if n_runs < 2:
        raise ValueError(f"n_runs must be at least 2, got {n_runs}")
    validate(params)
    log = logger or get_logger("vnfchain.simulation.replication")
    with telemetry_span(log, "simulate.replicate", runs=n_runs, seed=cfg.seed) as span:
        jobs_list = [(params, cfg, stream) for stream in replication_streams(cfg.seed, n_runs)]
        runs = parallel_map(_run, jobs_list, jobs=jobs, name="simulate.replicate.map", logger=log)
        summary = summarize(runs)
        span.record(P_D=summary.mean["P_D"], P_D_std=summary.std["P_D"])
    return summary
