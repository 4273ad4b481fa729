"""Side-by-side comparison of the decomposition against a simulation run."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Dict

from vnfchain.analysis.pipeline import Analysis
from vnfchain.models.simulation import SimResult

COMPARISON_COLUMNS: tuple[str, ...] = (
    "alpha",
    "P_D_ana",
    "P_D_sim",
    "P_D_abs_err",
    "P_D_rel_err",
    "Qbar_ana",
    "Qbar_sim",
    "Qbar_abs_err",
    "Qbar_rel_err",
)


def _relative(error: float | None, reference: float | None) -> float | None:
    if error is None or reference is None or reference == 0.0:
        return None
    return error / abs(reference)


@dataclass(frozen=True, slots=True)
class ComparisonRow:
    """Absolute and relative errors of the analysis, taking the simulation as reference.

    Queue-length columns are ``None`` when the analysis found Q6 unstable.
    """

    alpha: float
    P_D_ana: float
    P_D_sim: float
    P_D_abs_err: float
    P_D_rel_err: float | None
    Qbar_ana: float | None
    Qbar_sim: float | None
    Qbar_abs_err: float | None
    Qbar_rel_err: float | None

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)


def compare(analysis: Analysis, sim: SimResult) -> ComparisonRow:
    if analysis.params != sim.params:
        raise ValueError("analysis and simulation were run on different parameters")
    ana, emp = analysis.metrics, sim.metrics
    drop_err = abs(ana.drop_total - emp.drop_total)
    qbar_err = None
    if ana.mean_total is not None and emp.mean_total is not None:
        qbar_err = abs(ana.mean_total - emp.mean_total)
    return ComparisonRow(
        alpha=analysis.params.alpha,
        P_D_ana=ana.drop_total,
        P_D_sim=emp.drop_total,
        P_D_abs_err=drop_err,
        P_D_rel_err=_relative(drop_err, emp.drop_total),
        Qbar_ana=ana.mean_total,
        Qbar_sim=emp.mean_total,
        Qbar_abs_err=qbar_err,
        Qbar_rel_err=_relative(qbar_err, emp.mean_total),
    )
