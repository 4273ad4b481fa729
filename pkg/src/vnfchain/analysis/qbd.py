"""Tandem processing -> transmission subsystems as finite QBD chains.

The level is the processing-queue length and the phase the transmission-queue
length. States are ordered level-major: index ``i * (M_tx + 1) + j`` is (i, j).
Subsystem 1 is (Q1, Q2) fed at ``p * alpha``; subsystem 2 is (Q3, Q4) fed at
``p * (1 - alpha)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from vnfchain.core.dtmc import (
    SolveMethod,
    SteadyState,
    check_stochastic,
    marginal,
    reachable_states,
    solve_steady_state,
)

Matrix = NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class QbdBlocks:
    """The six ``(M_tx + 1)``-square blocks of a level-structured transition matrix."""

    B: Matrix
    C: Matrix
    E: Matrix
    A0: Matrix
    A1: Matrix
    A2: Matrix

    @property
    def phases(self) -> int:
        return int(self.B.shape[0])

    def check(self) -> None:
        """Each row group of the assembled matrix must be stochastic."""
        check_stochastic(self.B + self.C)
        check_stochastic(self.E + self.A1 + self.A0)
        check_stochastic(self.A2 + self.A1 + self.A0)
        check_stochastic(self.A2 + (self.A0 + self.A1))


@dataclass(frozen=True, slots=True)
class TandemRates:
    """Effective rates around a tandem.

    ``lambda_out`` feeds the transmission queue, ``lambda_next`` leaves it for the next hop.
    """

    lambda_in: float
    lambda_out: float
    lambda_next: float


def intra_phase_matrices(mu_tx: float, M_tx: int) -> tuple[Matrix, Matrix]:
    """Phase transitions of the transmission queue without (P1) and with (P2) a fed task.

    A task fed to a full queue is kept only when the queue serves in the same slot, so
    the last row of P2 stays in the full state either way.
    """

    if not 0.0 < mu_tx <= 1.0:
        raise ValueError(f"mu_tx must lie in (0, 1], got {mu_tx}")
    if M_tx < 1:
        raise ValueError(f"M_tx must be at least 1, got {M_tx}")
    size = M_tx + 1
    stay = 1.0 - mu_tx

    no_feed = np.zeros((size, size))
    no_feed[0, 0] = 1.0
    for j in range(1, size):
        no_feed[j, j - 1] = mu_tx
        no_feed[j, j] = stay

    feed = np.zeros((size, size))
    feed[0, 1] = 1.0
    for j in range(1, M_tx):
        feed[j, j] = mu_tx
        feed[j, j + 1] = stay
    feed[M_tx, M_tx] = 1.0
    return no_feed, feed


def build_blocks(lambda_in: float, mu_proc: float, mu_tx: float, M_tx: int) -> QbdBlocks:
    no_feed, feed = intra_phase_matrices(mu_tx, M_tx)
    lam, lam_bar = lambda_in, 1.0 - lambda_in
    mu, mu_bar = mu_proc, 1.0 - mu_proc
    blocks = QbdBlocks(
        B=lam_bar * no_feed,
        C=lam * no_feed,
        E=lam_bar * mu * feed,
        A0=lam * mu_bar * no_feed,
        A1=lam_bar * mu_bar * no_feed + lam * mu * feed,
        A2=lam_bar * mu * feed,
    )
    blocks.check()
    return blocks


def assemble(blocks: QbdBlocks, M_level: int) -> Matrix:
    """Block-tridiagonal transition matrix over levels ``0..M_level``.

    Block rows: ``[B C]`` at level 0, ``[E A1 A0]`` at level 1, ``[A2 A1 A0]`` for the
    interior and ``[A2 (A0 + A1)]`` at the last level, where an arrival without a service
    completion is dropped.
    """

    if M_level < 1:
        raise ValueError(f"M_level must be at least 1, got {M_level}")
    m = blocks.phases
    levels = M_level + 1
    matrix = np.zeros((levels * m, levels * m))

    def put(row: int, col: int, block: Matrix) -> None:
        matrix[row * m : (row + 1) * m, col * m : (col + 1) * m] += block

    put(0, 0, blocks.B)
    put(0, 1, blocks.C)
    for level in range(1, levels):
        put(level, level - 1, blocks.E if level == 1 else blocks.A2)
        if level < M_level:
            put(level, level, blocks.A1)
            put(level, level + 1, blocks.A0)
        else:
            put(level, level, blocks.A0 + blocks.A1)
    return check_stochastic(matrix)


def level_probabilities(state: SteadyState) -> NDArray[np.float64]:
    return marginal(state, "level")


def phase_probabilities(state: SteadyState) -> NDArray[np.float64]:
    return marginal(state, "phase")


def solve_subsystem(
    lambda_in: float,
    mu_proc: float,
    mu_tx: float,
    M_proc: int,
    M_tx: int,
    *,
    method: SolveMethod = "direct",
) -> tuple[SteadyState, TandemRates]:
    """Steady state of a tandem and the effective rates it hands downstream."""

    shape = (M_proc + 1, M_tx + 1)
    blocks = build_blocks(lambda_in, mu_proc, mu_tx, M_tx)
    matrix = assemble(blocks, M_proc)
    # with lambda_in = mu_proc = 1 every busy level is closed and the full chain has one
    # recurrent class per level; the empty-started chain only visits what (0, 0) reaches
    reachable = reachable_states(matrix, 0)
    restricted = solve_steady_state(matrix[np.ix_(reachable, reachable)], method=method)
    vector = np.zeros(matrix.shape[0])
    vector[reachable] = restricted.probabilities
    state = SteadyState(vector, shape)
    levels = level_probabilities(state)
    phases = phase_probabilities(state)
    rates = TandemRates(
        lambda_in=lambda_in,
        lambda_out=float(levels[1:].sum()) * mu_proc,
        lambda_next=float(phases[1:].sum()) * mu_tx,
    )
    return state, rates
