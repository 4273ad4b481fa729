"""Command-line entry point: ``vnfchain <command> [options]``.

Exit codes: 0 success, 1 usage or configuration error, 2 Q6 instability.
"""

from __future__ import annotations

import argparse
import sys
import uuid
from pathlib import Path
from typing import Any, Callable, Sequence

from vnfchain.analysis.optimizer import (
    DEFAULT_GRID_STEP,
    DEFAULT_SURFACE_STEP,
    REGION_ALPHA,
    optimal_alpha_surface,
    pareto_front,
    parse_objective,
    performance_region,
    surface_axis,
    sweep_alpha,
)
from vnfchain.analysis.pipeline import Analysis, analyze_detailed
from vnfchain.core.errors import ConfigError, UnstableQueueError, VnfChainError
from vnfchain.models.metrics import METRIC_COLUMNS
from vnfchain.models.simulation import SimConfig
from vnfchain.models.system import SystemParams
from vnfchain.services import reports
from vnfchain.services.config import ConfigDocument, apply_overrides, load_config
from vnfchain.services.logging import get_logger
from vnfchain.services.tasks import parallel_map
from vnfchain.simulation.compare import COMPARISON_COLUMNS, ComparisonRow, compare
from vnfchain.simulation.engine import simulate
from vnfchain.simulation.replication import replicate
from vnfchain.simulation.rng import RNG_NAME

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSTABLE = 2

_logger = get_logger("vnfchain.cli")


class UsageError(VnfChainError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> Any:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from error
    return values


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from error
    return values


def _key_value(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    return key.strip(), value.strip()


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="TOML config (default: $VNFCHAIN_CONFIG)")
    common.add_argument("--alpha", type=str, default=None, help="override the routing probability")
    common.add_argument("--p", type=str, default=None, help="override the arrival probability")
    common.add_argument("--set", dest="overrides", type=_key_value, action="append", default=[],
                        metavar="KEY=VALUE", help="override any parameter, e.g. --set mu3=0.4")
    common.add_argument("--convention", choices=("rate", "joint"), default="rate",
                        help="drop formula for the transmission queues")
    common.add_argument("--out", type=str, default=None, help="CSV output path, '-' for stdout")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: $VNFCHAIN_JOBS or 1)")
    common.add_argument("--verbose", action="store_true", help="log progress at INFO level")
    return common


def _simulation_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--slots", type=int, default=None)
    parser.add_argument("--warmup", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = _Parser(prog="vnfchain", description="Queueing analysis of a two-VNF service chain")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("analyze", parents=[common], help="decomposition metrics for one configuration")

    sim = commands.add_parser("simulate", parents=[common], help="slot-level simulation")
    _simulation_flags(sim)
    sim.add_argument("--runs", type=int, default=None, help="independent replications")

    cmp_ = commands.add_parser("compare", parents=[common], help="analysis against simulation per alpha")
    cmp_.add_argument("--alphas", type=_float_list, required=True, help="comma-separated alphas")
    _simulation_flags(cmp_)

    sweep = commands.add_parser("sweep", parents=[common], help="brute-force search over alpha")
    sweep.add_argument("--step", type=float, default=DEFAULT_GRID_STEP)
    sweep.add_argument("--objective", choices=("drop", "tasks", "weighted"), default="drop")
    sweep.add_argument("--weight", type=float, default=None, help="weight of P_D in the weighted objective")

    region = commands.add_parser("region", parents=[common], help="throughput and delay over (mu, M)")
    region.add_argument("--mus", type=_float_list, required=True)
    region.add_argument("--capacities", type=_int_list, required=True)
    region.add_argument("--region-alpha", type=float, default=REGION_ALPHA)
    region.add_argument("--source", choices=("analysis", "simulation"), default="analysis")
    _simulation_flags(region)

    surface = commands.add_parser("surface", parents=[common], help="optimal alpha over (mu1, mu2)")
    surface.add_argument("--mu-step", type=float, default=DEFAULT_SURFACE_STEP)
    surface.add_argument("--step", type=float, default=DEFAULT_GRID_STEP)
    surface.add_argument("--objective", choices=("drop", "tasks", "weighted"), default="drop")
    surface.add_argument("--weight", type=float, default=None)
    return parser


# ---------------------------------------------------------------------- resolution helpers
def _resolve(args: argparse.Namespace) -> tuple[ConfigDocument, SystemParams]:
    document = load_config(args.config)
    overrides = dict(args.overrides)
    if args.alpha is not None:
        overrides["alpha"] = args.alpha
    if args.p is not None:
        overrides["p"] = args.p
    return document, apply_overrides(document.params, overrides)


def _sim_config(args: argparse.Namespace, document: ConfigDocument) -> SimConfig:
    settings = document.simulation
    try:
        return SimConfig(
            slots=args.slots if args.slots is not None else settings.slots,
            warmup=args.warmup if args.warmup is not None else settings.warmup,
            seed=args.seed if args.seed is not None else settings.seed,
        )
    except ValueError as error:
        raise ConfigError(str(error), key="simulation") from error


def _meta(args: argparse.Namespace, document: ConfigDocument, params: SystemParams, **extra: Any) -> reports.ReportMeta:
    meta = reports.ReportMeta(command=args.command, params=params, convention=args.convention)
    if document.meta.get("name"):
        meta.extra["config"] = document.meta["name"]
    meta.extra.update(extra)
    return meta


def _emit(args: argparse.Namespace, frame: Any, meta: reports.ReportMeta, report: str) -> None:
    if args.out != "-":
        print(report)
    if args.out is not None:
        reports.write_csv(frame, meta, args.out)


# ---------------------------------------------------------------------- commands
def cmd_analyze(args: argparse.Namespace) -> int:
    document, params = _resolve(args)
    status = EXIT_OK
    try:
        analysis = analyze_detailed(params, convention=args.convention)
        metrics = analysis.metrics
        lambda6 = analysis.q6_inputs.lambda6
    except UnstableQueueError as error:
        if error.partial is None:
            raise
        metrics = error.partial
        lambda6 = error.lambda6
        print(f"unstable: lambda6={error.lambda6:.6g} >= mu6={error.mu6:.6g}", file=sys.stderr)
        status = EXIT_UNSTABLE
    record = {"alpha": params.alpha, "stable": metrics.stable, "lambda6": lambda6, **metrics.to_record()}
    frame = reports.records_frame([record], ["alpha", "stable", "lambda6", *METRIC_COLUMNS])
    _emit(args, frame, _meta(args, document, params), reports.format_metrics(metrics))
    return status


def cmd_simulate(args: argparse.Namespace) -> int:
    document, params = _resolve(args)
    cfg = _sim_config(args, document)
    runs = args.runs if args.runs is not None else document.simulation.runs
    if runs < 1:
        raise UsageError(f"--runs must be positive, got {runs}")
    meta = _meta(args, document, params, slots=cfg.slots, warmup=cfg.warmup, runs=runs)
    meta.seed, meta.rng = cfg.seed, RNG_NAME
    if runs == 1:
        result = simulate(params, cfg)
        frame = reports.records_frame([result.to_record()])
        _emit(args, frame, meta, reports.format_simulation(result))
        return EXIT_OK
    summary = replicate(params, cfg, runs, jobs=args.jobs)
    rows = [
        {"metric": name, "mean": summary.mean[name], "std": summary.std[name],
         "ci_half_width": summary.ci_half_width[name]}
        for name in METRIC_COLUMNS
    ]
    frame = reports.records_frame(rows, ["metric", "mean", "std", "ci_half_width"])
    _emit(args, frame, meta, reports.format_summary(summary))
    return EXIT_OK


def _compare_point(job: tuple[SystemParams, SimConfig, str]) -> ComparisonRow:
    params, cfg, convention = job
    try:
        analysis: Analysis = analyze_detailed(params, convention=convention)  # type: ignore[arg-type]
    except UnstableQueueError as error:
        if error.upstream is None:
            raise
        analysis = error.upstream
    return compare(analysis, simulate(params, cfg))


def cmd_compare(args: argparse.Namespace) -> int:
    if not args.alphas:
        raise UsageError("--alphas needs at least one value")
    document, params = _resolve(args)
    cfg = _sim_config(args, document)
    points = [(apply_overrides(params, {"alpha": repr(alpha)}), cfg, args.convention) for alpha in args.alphas]
    rows = parallel_map(_compare_point, points, jobs=args.jobs, name="cli.compare", logger=_logger)
    frame = reports.records_frame([row.to_record() for row in rows], COMPARISON_COLUMNS)
    meta = _meta(args, document, params, slots=cfg.slots, warmup=cfg.warmup)
    meta.seed, meta.rng = cfg.seed, RNG_NAME
    _emit(args, frame, meta, reports.format_table(frame, title="Analysis vs simulation"))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    document, params = _resolve(args)
    objective = parse_objective(args.objective, args.weight)
    result = sweep_alpha(params, args.step, objective, convention=args.convention, jobs=args.jobs)
    records = result.to_records()
    stable = [i for i, point in enumerate(result.points) if point.metrics.mean_total is not None]
    coords = [(result.points[i].metrics.drop_total, float(result.points[i].metrics.mean_total or 0.0)) for i in stable]
    front = {stable[i] for i in pareto_front(coords)}
    for index, record in enumerate(records):
        record["pareto"] = index in front
    columns = ["alpha", "objective", "stable", "optimal", "pareto", *METRIC_COLUMNS]
    frame = reports.records_frame(records, columns)
    report = (
        f"objective {result.objective}: best alpha = {result.best_alpha:g} "
        f"(value {result.best_value:.6g}); {len(result.unstable_alphas)} unstable grid points"
    )
    meta = _meta(args, document, params, objective=result.objective, step=args.step)
    _emit(args, frame, meta, report)
    return EXIT_OK


def cmd_region(args: argparse.Namespace) -> int:
    document, params = _resolve(args)
    cfg = _sim_config(args, document) if args.source == "simulation" else None
    rows = performance_region(
        args.mus, args.capacities, params, alpha=args.region_alpha, source=args.source,
        sim_config=cfg, jobs=args.jobs,
    )
    frame = reports.records_frame([row.to_record() for row in rows], ["mu", "M", "throughput", "delay", "P_D", "stable"])
    meta = _meta(args, document, params, source=args.source, region_alpha=args.region_alpha)
    if cfg is not None:
        meta.seed, meta.rng = cfg.seed, RNG_NAME
    _emit(args, frame, meta, reports.format_table(frame, title="Performance region"))
    return EXIT_OK


def cmd_surface(args: argparse.Namespace) -> int:
    document, params = _resolve(args)
    objective = parse_objective(args.objective, args.weight)
    axis = surface_axis(args.mu_step)
    cells = optimal_alpha_surface(params, axis, axis, args.step, objective, convention=args.convention, jobs=args.jobs)
    frame = reports.records_frame([cell.to_record() for cell in cells], ["mu1", "mu2", "alpha_opt", "objective"])
    meta = _meta(args, document, params, objective=args.objective, step=args.step, mu_step=args.mu_step)
    table = frame.pivot(index="mu1", columns="mu2", values="alpha_opt")
    _emit(args, frame, meta, f"optimal alpha (rows mu1, columns mu2)\n{table.to_string(na_rep='-')}")
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "region": cmd_region,
    "surface": cmd_surface,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            get_logger("vnfchain").set_level("info")
        _logger.bind(run_id=uuid.uuid4().hex[:12], command=args.command)
        return COMMANDS[args.command](args)
    except UnstableQueueError as error:
        print(f"unstable: lambda6={error.lambda6:.6g} >= mu6={error.mu6:.6g}", file=sys.stderr)
        return EXIT_UNSTABLE
    except VnfChainError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        _logger.clear_context()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
