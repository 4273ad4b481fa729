"""Brute-force routing sweeps, trade-off curves and performance regions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Literal, Sequence, Tuple, Union

import numpy as np

from vnfchain.core.errors import SweepError, UnstableQueueError
from vnfchain.models.metrics import SystemMetrics
from vnfchain.models.simulation import SimConfig
from vnfchain.models.system import BUFFER_COUNT, SystemParams, validate
from vnfchain.services.logging import StructuredLogger, get_logger
from vnfchain.services.tasks import parallel_map
from vnfchain.services.telemetry import telemetry_span
from vnfchain.simulation.engine import simulate

from .metrics import DropConvention
from .pipeline import analyze

Objective = Union[Literal["drop", "tasks"], Tuple[Literal["weighted"], float]]
RegionSource = Literal["analysis", "simulation"]

DEFAULT_GRID_STEP = 0.01
DEFAULT_SURFACE_STEP = 0.05
REGION_ALPHA = 0.5


def parse_objective(name: str, weight: float | None = None) -> Objective:
    if name in ("drop", "tasks"):
        if weight is not None:
            raise SweepError(f"objective {name!r} takes no weight")
        return name  # type: ignore[return-value]
    if name == "weighted":
        if weight is None:
            raise SweepError("weighted objective needs a weight")
        return ("weighted", weight)
    raise SweepError(f"unknown objective {name!r}")


def _check_objective(objective: Objective) -> None:
    if objective in ("drop", "tasks"):
        return
    if isinstance(objective, tuple) and len(objective) == 2 and objective[0] == "weighted":
        weight = objective[1]
        if isinstance(weight, (int, float)) and 0.0 <= weight <= 1.0:
            return
        raise SweepError(f"weight must lie in [0, 1], got {weight!r}")
    raise SweepError(f"unknown objective {objective!r}")


def objective_label(objective: Objective) -> str:
    if isinstance(objective, tuple):
        return f"weighted({objective[1]:g})"
    return objective


def objective_value(metrics: SystemMetrics, objective: Objective) -> float | None:
    """Value to minimize; ``None`` when it needs Q6 and Q6 is unstable."""

    if objective == "drop":
        return metrics.drop_total
    if metrics.mean_total is None:
        return None
    if objective == "tasks":
        return metrics.mean_total
    weight = objective[1]
    return weight * metrics.drop_total + (1.0 - weight) * metrics.mean_total


def alpha_grid(step: float = DEFAULT_GRID_STEP) -> tuple[float, ...]:
    """``{k * step}`` rounded to 12 decimals, plus 1.0, over [0, 1]."""

    if not (isinstance(step, (int, float)) and 0.0 < step <= 0.5):
        raise SweepError(f"grid step must lie in (0, 0.5], got {step!r}")
    count = int(math.floor(1.0 / step + 1e-9))
    points = {round(k * step, 12) for k in range(count + 1)}
    points.add(1.0)
    return tuple(sorted(a for a in points if a <= 1.0))


def _evaluate(job: tuple[SystemParams, DropConvention]) -> tuple[SystemMetrics, bool]:
    params, convention = job
    try:
        return analyze(params, convention=convention), True
    except UnstableQueueError as error:
        if error.partial is None:
            raise
        return error.partial, False


@dataclass(frozen=True, slots=True)
class SweepPoint:
    alpha: float
    metrics: SystemMetrics
    stable: bool
    value: float | None


@dataclass(frozen=True, slots=True)
class SweepResult:
    """Every evaluated grid point and the minimizer of one objective.

    Ties resolve to the smallest alpha. Points whose objective needs an unstable
    Q6 carry ``value=None`` and never win.
    """

    objective: str
    points: tuple[SweepPoint, ...]
    best_alpha: float
    best_value: float

    @property
    def grid(self) -> tuple[float, ...]:
        return tuple(point.alpha for point in self.points)

    @property
    def values(self) -> tuple[float | None, ...]:
        return tuple(point.value for point in self.points)

    @property
    def unstable_alphas(self) -> tuple[float, ...]:
        return tuple(point.alpha for point in self.points if not point.stable)

    @property
    def best(self) -> SweepPoint:
        return next(point for point in self.points if point.alpha == self.best_alpha)

    def to_records(self) -> list[Dict[str, Any]]:
        rows = []
        for point in self.points:
            row: Dict[str, Any] = {"alpha": point.alpha, "objective": point.value, "stable": point.stable}
            row.update(point.metrics.to_record())
            row["optimal"] = point.alpha == self.best_alpha
            rows.append(row)
        return rows


def _argmin(points: Sequence[SweepPoint]) -> SweepPoint | None:
    best: SweepPoint | None = None
    for point in points:
        if point.value is None:
            continue
        if best is None or point.value < best.value:  # type: ignore[operator]
            best = point
    return best


def evaluate_grid(
    params_base: SystemParams,
    grid: Sequence[float],
    *,
    convention: DropConvention = "rate",
    jobs: int | None = None,
    logger: StructuredLogger | None = None,
) -> list[tuple[SystemMetrics, bool]]:
    validate(params_base)
    jobs_list = [(params_base.with_alpha(alpha), convention) for alpha in grid]
    return parallel_map(_evaluate, jobs_list, jobs=jobs, name="optimizer.grid", logger=logger)


def sweep_alpha(
    params_base: SystemParams,
    grid_step: float = DEFAULT_GRID_STEP,
    objective: Objective = "drop",
    *,
    convention: DropConvention = "rate",
    jobs: int | None = None,
    logger: StructuredLogger | None = None,
) -> SweepResult:
    """Evaluate the decomposition on :func:`alpha_grid` and pick the best routing."""

    log = logger or get_logger("vnfchain.analysis.optimizer")
    _check_objective(objective)
    grid = alpha_grid(grid_step)
    label = objective_label(objective)
    with telemetry_span(log, "optimizer.sweep", objective=label, points=len(grid)) as span:
        evaluated = evaluate_grid(params_base, grid, convention=convention, jobs=jobs, logger=log)
        points = tuple(
            SweepPoint(alpha, metrics, stable, objective_value(metrics, objective))
            for alpha, (metrics, stable) in zip(grid, evaluated)
        )
        unstable = [point.alpha for point in points if not point.stable]
        if unstable:
            log.warning("optimizer.unstable_points", count=len(unstable), first=unstable[0], last=unstable[-1])
        best = _argmin(points)
        if best is None:
            raise SweepError(f"every grid point leaves Q6 unstable; objective {label!r} is undefined")
        assert best.value is not None
        span.record(best_alpha=best.alpha, best_value=best.value)
    return SweepResult(objective=label, points=points, best_alpha=best.alpha, best_value=best.value)


def pareto_front(points: Sequence[tuple[float, float]]) -> list[int]:
    """Indices of the points not dominated in the (P_D, Qbar) plane, both minimized.

    A point is dominated when another is no worse in both coordinates and strictly
    better in one; equal points do not dominate each other.
    """

    if not points:
        return []
    coords = np.asarray(points, dtype=float).reshape(-1, 2)
    no_worse = (coords[None, :, :] <= coords[:, None, :]).all(axis=2)
    better = (coords[None, :, :] < coords[:, None, :]).any(axis=2)
    dominated = (no_worse & better).any(axis=1)
    return [int(i) for i in np.flatnonzero(~dominated)]


@dataclass(frozen=True, slots=True)
class TradeoffPoint:
    alpha: float
    drop_total: float
    mean_total: float | None
    pareto: bool

    def to_record(self) -> Dict[str, Any]:
        return {"alpha": self.alpha, "P_D": self.drop_total, "Qbar": self.mean_total, "pareto": self.pareto}


def tradeoff_curve(
    params_base: SystemParams,
    grid_step: float = DEFAULT_GRID_STEP,
    *,
    convention: DropConvention = "rate",
    jobs: int | None = None,
    logger: StructuredLogger | None = None,
) -> list[TradeoffPoint]:
    """(alpha, P_D, Qbar) over the grid; unstable points have no Qbar and are never Pareto-efficient."""

    log = logger or get_logger("vnfchain.analysis.optimizer")
    grid = alpha_grid(grid_step)
    with telemetry_span(log, "optimizer.tradeoff", points=len(grid)):
        evaluated = evaluate_grid(params_base, grid, convention=convention, jobs=jobs, logger=log)
    stable_index = [i for i, (metrics, stable) in enumerate(evaluated) if stable]
    coords = [(evaluated[i][0].drop_total, evaluated[i][0].mean_total) for i in stable_index]
    efficient = {stable_index[i] for i in pareto_front(coords)}  # type: ignore[arg-type]
    return [
        TradeoffPoint(alpha, metrics.drop_total, metrics.mean_total, i in efficient)
        for i, (alpha, (metrics, _)) in enumerate(zip(grid, evaluated))
    ]


@dataclass(frozen=True, slots=True)
class RegionRow:
    mu: float
    M: int
    throughput: float
    delay: float | None
    P_D: float
    stable: bool

    def to_record(self) -> Dict[str, Any]:
        return {
            "mu": self.mu,
            "M": self.M,
            "throughput": self.throughput,
            "delay": self.delay,
            "P_D": self.P_D,
            "stable": self.stable,
        }


def region_params(params_base: SystemParams, mu: float, capacity: int, alpha: float) -> SystemParams:
    """Every finite queue at service probability ``mu`` and capacity ``capacity``; Q6 keeps its rate."""
    return params_base.replace(
        alpha=alpha,
        mu=(mu,) * BUFFER_COUNT + (params_base.mu[5],),
        buffer=(capacity,) * BUFFER_COUNT,
    )


def _region_point(job: tuple[SystemParams, RegionSource, SimConfig | None]) -> RegionRow:
    params, source, sim_config = job
    mu, capacity = params.mu[0], params.buffer[0]
    if source == "analysis":
        metrics, stable = _evaluate((params, "rate"))
    else:
        result = simulate(params, sim_config or SimConfig())
        metrics = result.metrics
        stable = result.accepted[5] / result.measured_slots < params.mu[5]
    return RegionRow(mu, capacity, metrics.throughput, metrics.delay, metrics.drop_total, stable)


def performance_region(
    mu_list: Sequence[float],
    M_list: Sequence[int],
    params_base: SystemParams,
    *,
    alpha: float = REGION_ALPHA,
    source: RegionSource = "analysis",
    sim_config: SimConfig | None = None,
    jobs: int | None = None,
    logger: StructuredLogger | None = None,
) -> list[RegionRow]:
    """Throughput, delay and drop rate over a (mu, M) grid, rows ordered mu-major.

    Unstable points stay in the table with ``stable=False`` and no delay.
    """

    if source not in ("analysis", "simulation"):
        raise SweepError(f"unknown region source {source!r}")
    if not mu_list or not M_list:
        raise SweepError("performance region needs at least one mu and one M")
    log = logger or get_logger("vnfchain.analysis.optimizer")
    jobs_list = []
    for mu in mu_list:
        for capacity in M_list:
            params = validate(region_params(params_base, mu, capacity, alpha))
            jobs_list.append((params, source, sim_config))
    with telemetry_span(log, "optimizer.region", points=len(jobs_list), source=source):
        rows = parallel_map(_region_point, jobs_list, jobs=jobs, name="optimizer.region.map", logger=log)
    unstable = sum(1 for row in rows if not row.stable)
    if unstable:
        log.warning("optimizer.region.unstable_points", count=unstable)
    return rows


def surface_axis(step: float = DEFAULT_SURFACE_STEP) -> tuple[float, ...]:
    """Service probabilities ``step, 2*step, ..., 1`` for the optimal-alpha maps."""
    if not 0.0 < step <= 1.0:
        raise SweepError(f"axis step must lie in (0, 1], got {step!r}")
    count = int(math.floor(1.0 / step + 1e-9))
    values = {round(k * step, 12) for k in range(1, count + 1)}
    values.add(1.0)
    return tuple(sorted(v for v in values if v <= 1.0))


@dataclass(frozen=True, slots=True)
class SurfaceCell:
    mu1: float
    mu2: float
    best_alpha: float | None
    best_value: float | None

    def to_record(self) -> Dict[str, Any]:
        return {"mu1": self.mu1, "mu2": self.mu2, "alpha_opt": self.best_alpha, "objective": self.best_value}


def _surface_cell(job: tuple[SystemParams, float, Objective, DropConvention]) -> SurfaceCell:
    params, step, objective, convention = job
    try:
        result = sweep_alpha(params, step, objective, convention=convention, jobs=1)
    except SweepError:
        return SurfaceCell(params.mu[0], params.mu[1], None, None)
    return SurfaceCell(params.mu[0], params.mu[1], result.best_alpha, result.best_value)


def optimal_alpha_surface(
    params_base: SystemParams,
    mu1_values: Sequence[float],
    mu2_values: Sequence[float],
    grid_step: float = DEFAULT_GRID_STEP,
    objective: Objective = "drop",
    *,
    convention: DropConvention = "rate",
    jobs: int | None = None,
    logger: StructuredLogger | None = None,
) -> list[SurfaceCell]:
    """Optimal routing for every (mu1, mu2) pair; cells with no stable alpha are left empty."""

    _check_objective(objective)
    alpha_grid(grid_step)
    log = logger or get_logger("vnfchain.analysis.optimizer")
    jobs_list = []
    for mu1 in mu1_values:
        for mu2 in mu2_values:
            mu = (mu1, mu2) + tuple(params_base.mu[2:])
            jobs_list.append((validate(params_base.replace(mu=mu)), grid_step, objective, convention))
    with telemetry_span(log, "optimizer.surface", cells=len(jobs_list), objective=objective_label(objective)):
        return parallel_map(_surface_cell, jobs_list, jobs=jobs, name="optimizer.surface.map", logger=log)
