"""CSV artifacts and human-readable reports.

Every CSV starts with ``#``-prefixed metadata lines (schema version, command,
the resolved parameters as TOML keys, seed and RNG when a simulation was
involved, drop convention) followed by a header row and comma-separated data.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import pandas as pd

from vnfchain.models.metrics import SystemMetrics
from vnfchain.models.simulation import ReplicationSummary, SimResult
from vnfchain.models.system import SystemParams

from .config import dump_params
from .logging import get_logger

CSV_SCHEMA = "vnfchain-csv/1"
DELAY_NOTE = (
    "delay counts in-network time in Q1..Q6 only; throughput and delay are derived "
    "by flow accounting and Little's law"
)

_logger = get_logger("vnfchain.services.reports")


@dataclass(slots=True)
class ReportMeta:
    command: str
    params: SystemParams | None = None
    convention: str | None = None
    seed: int | None = None
    rng: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def lines(self) -> list[str]:
        lines = [f"# schema = {CSV_SCHEMA}", f"# command = {self.command}"]
        if self.params is not None:
            lines.extend(f"# {line}" for line in dump_params(self.params).splitlines())
        if self.convention is not None:
            lines.append(f"# drop_convention = {self.convention}")
        if self.seed is not None:
            lines.append(f"# seed = {self.seed}")
        if self.rng is not None:
            lines.append(f"# rng = {self.rng}")
        for key, value in self.extra.items():
            lines.append(f"# {key} = {value}")
        lines.append(f"# note = {DELAY_NOTE}")
        return lines


def records_frame(records: Iterable[Mapping[str, Any]], columns: Sequence[str] | None = None) -> pd.DataFrame:
    frame = pd.DataFrame(list(records))
    if columns is not None:
        frame = frame.reindex(columns=list(columns))
    return frame


def render_csv(frame: pd.DataFrame, meta: ReportMeta) -> str:
    header = "\n".join(meta.lines()) + "\n"
    return header + frame.to_csv(index=False, lineterminator="\n")


def write_csv(frame: pd.DataFrame, meta: ReportMeta, out: str | Path) -> None:
    """Write to ``out``; ``"-"`` means stdout."""

    text = render_csv(frame, meta)
    if str(out) == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    _logger.info("reports.csv.written", path=str(path), rows=len(frame), command=meta.command)


def _fmt(value: float | None, digits: int = 6) -> str:
    return "n/a" if value is None else f"{value:.{digits}g}"


def format_metrics(metrics: SystemMetrics, *, title: str = "System metrics") -> str:
    table = pd.DataFrame(
        {
            "P_D": [*metrics.drop_per_queue, None],
            "Qbar": list(metrics.mean_len_per_queue),
        },
        index=[f"Q{i}" for i in range(1, 7)],
    )
    lines = [title, table.to_string(na_rep="-", float_format=lambda v: f"{v:.6g}"), ""]
    lines.append(f"P_D (tasks/slot)     {_fmt(metrics.drop_total)}")
    lines.append(f"Qbar (tasks)         {_fmt(metrics.mean_total)}")
    lines.append(f"throughput           {_fmt(metrics.throughput)}")
    lines.append(f"delay (slots)        {_fmt(metrics.delay)}")
    if not metrics.stable:
        lines.append("Q6 is unstable: Qbar6, Qbar and delay are undefined")
    return "\n".join(lines)


def format_simulation(result: SimResult) -> str:
    lines = [format_metrics(result.metrics, title=f"Simulated metrics ({result.stream})"), ""]
    lines.append(f"measured slots       {result.measured_slots}")
    lines.append(f"offered arrivals     {result.offered}")
    lines.append(f"drops / departures   {result.total_drops} / {result.system_departures}")
    lines.append(f"accounting residual  {result.accounting_residual}")
    return "\n".join(lines)


def format_summary(summary: ReplicationSummary) -> str:
    frame = pd.DataFrame(
        {"mean": summary.mean, "std": summary.std, "ci_half_width": summary.ci_half_width}
    )
    pct = int(round(summary.confidence * 100))
    return "\n".join(
        [
            f"{summary.n_runs} replications, {pct}% Student-t intervals",
            frame.to_string(na_rep="-", float_format=lambda v: f"{v:.6g}"),
        ]
    )


def format_table(frame: pd.DataFrame, *, title: str | None = None) -> str:
    body = frame.to_string(index=False, na_rep="-", float_format=lambda v: f"{v:.6g}")
    return body if title is None else f"{title}\n{body}"
