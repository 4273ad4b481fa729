"""Subsystem 3: the finite transmission queue Q5 fed by Q4's departures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from vnfchain.core.dtmc import SolveMethod, SteadyState, check_stochastic, solve_steady_state
from vnfchain.services.logging import get_logger

_logger = get_logger("vnfchain.analysis.birth_death")


@dataclass(frozen=True, slots=True)
class BirthDeathParams:
    """Bernoulli(``lam``) arrivals, geometric(``mu``) service, capacity ``M``."""

    lam: float
    mu: float
    M: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lam must lie in [0, 1], got {self.lam}")
        if not 0.0 < self.mu <= 1.0:
            raise ValueError(f"mu must lie in (0, 1], got {self.mu}")
        if self.M < 1:
            raise ValueError(f"M must be at least 1, got {self.M}")


def bd_transition_matrix(params: BirthDeathParams) -> NDArray[np.float64]:
    lam, mu, M = params.lam, params.mu, params.M
    lam_bar, mu_bar = 1.0 - lam, 1.0 - mu
    matrix = np.zeros((M + 1, M + 1))
    matrix[0, 0] = lam_bar
    matrix[0, 1] = lam
    for i in range(1, M + 1):
        matrix[i, i - 1] = lam_bar * mu
        if i < M:
            matrix[i, i] = lam * mu + lam_bar * mu_bar
            matrix[i, i + 1] = lam * mu_bar
        else:
            # an arrival to a full queue is kept only if a task leaves in the same slot
            matrix[i, i] = lam_bar * mu_bar + lam
    return check_stochastic(matrix)


def bd_steady_state(params: BirthDeathParams, *, method: SolveMethod = "direct") -> SteadyState:
    """Closed-form stationary vector from the balance equations.

    ``pi_i = lam^i mu_bar^(i-1) / (lam_bar^i mu^i) * pi_0`` for ``1 <= i <= M``. The
    form divides by ``1 - lam``, so ``lam == 1`` is solved from the matrix instead.
    """

    lam, mu, M = params.lam, params.mu, params.M
    if lam >= 1.0:
        _logger.warning("birth_death.matrix_fallback", lam=lam, mu=mu, M=M)
        return solve_steady_state(bd_transition_matrix(params), method=method)
    lam_bar, mu_bar = 1.0 - lam, 1.0 - mu
    first = lam / (lam_bar * mu)
    ratio = lam * mu_bar / (lam_bar * mu)
    weights = np.empty(M + 1)
    weights[0] = 1.0
    weights[1:] = first * ratio ** np.arange(M)
    return SteadyState(weights / weights.sum())


def tail_ratio(params: BirthDeathParams) -> float:
    """Geometric ratio ``pi_{i+1} / pi_i`` for ``i >= 1``."""
    return params.lam * (1.0 - params.mu) / ((1.0 - params.lam) * params.mu)
