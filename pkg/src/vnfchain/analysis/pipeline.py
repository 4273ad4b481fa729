"""End-to-end decomposition: solve the four subsystems in dependency order.

Subsystems 1 (Q1, Q2) and 2 (Q3, Q4) are independent; subsystem 3 (Q5) needs
lambda5 from subsystem 2; subsystem 4 (Q6) needs the Q2 and Q5 departure rates.
"""

from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import dataclass

from vnfchain.core.dtmc import SolveMethod, SteadyState
from vnfchain.core.errors import UnstableQueueError
from vnfchain.models.metrics import SystemMetrics
from vnfchain.models.system import SystemParams, validate
from vnfchain.services.logging import StructuredLogger, get_logger
from vnfchain.services.telemetry import telemetry_span

from .birth_death import BirthDeathParams, bd_steady_state
from .infinite_chain import (
    Q6Inputs,
    Q6Solution,
    check_stability,
    hessenberg_coefficients,
    q6_arrivals,
    q6_mean,
    solve_ztransform,
)
from .metrics import DropConvention, EffectiveRates, aggregate, drop_probabilities, mean_lengths
from .qbd import TandemRates, solve_subsystem


@dataclass(frozen=True, slots=True)
class Analysis:
    """Metrics plus every intermediate result of one decomposition run."""

    params: SystemParams
    metrics: SystemMetrics
    pi1: SteadyState
    pi2: SteadyState
    pi3: SteadyState
    tandem1: TandemRates
    tandem2: TandemRates
    q6_inputs: Q6Inputs
    q6: Q6Solution | None
    convention: DropConvention

    @property
    def lambda5(self) -> float:
        return self.tandem2.lambda_next

    @property
    def stable(self) -> bool:
        return self.q6 is not None

    @property
    def route_load(self) -> tuple[float, float]:
        """Tasks per slot delivered to Q6 by route 1 (via Q2) and route 2 (via Q5)."""
        return (self.q6_inputs.lambda_62, self.q6_inputs.lambda_65)


def _solve_tandems(
    params: SystemParams,
    method: SolveMethod,
    executor: Executor | None,
) -> tuple[tuple[SteadyState, TandemRates], tuple[SteadyState, TandemRates]]:
    route1 = (params.lambda1, params.mu[0], params.mu[1], params.buffer[0], params.buffer[1])
    route2 = (params.lambda3, params.mu[2], params.mu[3], params.buffer[2], params.buffer[3])
    if executor is None:
        return (
            solve_subsystem(*route1, method=method),
            solve_subsystem(*route2, method=method),
        )
    first = executor.submit(solve_subsystem, *route1, method=method)
    second = executor.submit(solve_subsystem, *route2, method=method)
    return first.result(), second.result()


def analyze_detailed(
    params: SystemParams,
    *,
    convention: DropConvention = "rate",
    method: SolveMethod = "direct",
    executor: Executor | None = None,
    logger: StructuredLogger | None = None,
) -> Analysis:
    """Run the decomposition.

    Raises :class:`UnstableQueueError` when Q6 fails the stability check; the error
    carries the finite-queue metrics (Q6-dependent entries withheld) and the partial
    analysis.
    """

    log = logger or get_logger("vnfchain.analysis.pipeline")
    validate(params)
    with telemetry_span(
        log, "pipeline.analyze", expected=(UnstableQueueError,), p=params.p, alpha=params.alpha
    ) as span:
        (pi1, tandem1), (pi2, tandem2) = _solve_tandems(params, method, executor)
        pi3 = bd_steady_state(BirthDeathParams(tandem2.lambda_next, params.mu[4], params.buffer[4]))
        inputs = q6_arrivals(pi1, pi3, params.mu[1], params.mu[4], mu6=params.mu[5])

        rates = EffectiveRates(
            lam=(tandem1.lambda_in, tandem1.lambda_out, tandem2.lambda_in, tandem2.lambda_out, tandem2.lambda_next),
            mu=(params.mu[0], params.mu[1], params.mu[2], params.mu[3], params.mu[4]),
        )
        drops = drop_probabilities(pi1, pi2, pi3, rates, convention=convention)

        try:
            check_stability(inputs)
            q6 = solve_ztransform(hessenberg_coefficients(inputs))
        except UnstableQueueError:
            partial = aggregate(drops, mean_lengths(pi1, pi2, pi3, None), params.p)
            upstream = Analysis(params, partial, pi1, pi2, pi3, tandem1, tandem2, inputs, None, convention)
            log.warning("pipeline.unstable", lambda6=inputs.lambda6, mu6=inputs.mu6, alpha=params.alpha)
            raise UnstableQueueError(
                inputs.lambda6, inputs.mu6, partial=partial, upstream=upstream
            ) from None

        metrics = aggregate(drops, mean_lengths(pi1, pi2, pi3, q6_mean(q6)), params.p)
        span.record(drop_total=metrics.drop_total, mean_total=metrics.mean_total, q6_method=q6.method)
    log.info(
        "pipeline.analyze.complete",
        alpha=params.alpha,
        drop_total=metrics.drop_total,
        mean_total=metrics.mean_total,
        lambda6=inputs.lambda6,
    )
    return Analysis(params, metrics, pi1, pi2, pi3, tandem1, tandem2, inputs, q6, convention)


def analyze(
    params: SystemParams,
    *,
    convention: DropConvention = "rate",
    method: SolveMethod = "direct",
    executor: Executor | None = None,
    logger: StructuredLogger | None = None,
) -> SystemMetrics:
    return analyze_detailed(
        params, convention=convention, method=method, executor=executor, logger=logger
    ).metrics
