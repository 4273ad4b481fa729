"""Finite discrete-time Markov chains: stochastic-matrix checks and steady-state solvers.

The dense direct solver replaces one balance equation with the normalization
condition. The GTH state-reduction solver is subtraction free and is kept as an
alternative for chains whose stationary vector spans many orders of magnitude.
Both return a :class:`SteadyState` whose residual ``||pi P - pi||_inf`` is at most
:data:`RESIDUAL_TOL`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg as la
from numpy.typing import ArrayLike, NDArray
from scipy import sparse
from scipy.sparse import csgraph

from .errors import NotStochasticError, ShapeError, SolverError

ROW_SUM_TOL = 1e-12
RESIDUAL_TOL = 1e-10
NEGATIVE_TOL = 1e-12

SolveMethod = Literal["direct", "gth"]
Axis = Literal["level", "phase"]


@dataclass(frozen=True, slots=True)
class SteadyState:
    """Stationary probability vector.

    Joint tandem chains carry ``shape = (levels, phases)``; the vector is ordered
    level-major, so entry ``i * phases + j`` is the probability of (level i, phase j).
    """

    probabilities: NDArray[np.float64]
    shape: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        self.probabilities.setflags(write=False)
        if self.shape is not None and self.shape[0] * self.shape[1] != self.probabilities.size:
            raise ShapeError(f"shape {self.shape} does not match {self.probabilities.size} states")

    def __len__(self) -> int:
        return int(self.probabilities.size)

    def __getitem__(self, index: int) -> float:
        return float(self.probabilities[index])

    def with_shape(self, levels: int, phases: int) -> "SteadyState":
        return SteadyState(self.probabilities.copy(), (levels, phases))

    def joint(self) -> NDArray[np.float64]:
        """The vector as a ``(levels, phases)`` matrix."""
        if self.shape is None:
            raise ShapeError("steady state carries no (level, phase) shape")
        return self.probabilities.reshape(self.shape)

    def expectation(self, axis: Axis | None = None) -> float:
        """Mean state index, or mean level/phase for a joint chain."""
        if axis is None:
            return float(np.arange(self.probabilities.size) @ self.probabilities)
        weights = marginal(self, axis)
        return float(np.arange(weights.size) @ weights)


def as_matrix(P: ArrayLike) -> NDArray[np.float64]:
    matrix = np.asarray(P, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NotStochasticError(f"matrix must be square, got shape {matrix.shape}")
    return matrix


def check_stochastic(P: ArrayLike, *, tol: float = ROW_SUM_TOL) -> NDArray[np.float64]:
    """Return ``P`` as a float matrix, raising when it is not row-stochastic."""
    matrix = as_matrix(P)
    if matrix.size == 0:
        raise NotStochasticError("matrix is empty")
    bad_entries = np.argwhere((matrix < 0.0) | (matrix > 1.0))
    if bad_entries.size:
        row = int(bad_entries[0][0])
        raise NotStochasticError("entries must lie in [0, 1]", row=row)
    deviation = np.abs(matrix.sum(axis=1) - 1.0)
    worst = int(np.argmax(deviation))
    if deviation[worst] > tol:
        raise NotStochasticError(f"row sums to {matrix[worst].sum():.17g}", row=worst)
    return matrix


def is_stochastic(P: ArrayLike, *, tol: float = ROW_SUM_TOL) -> bool:
    try:
        check_stochastic(P, tol=tol)
    except NotStochasticError:
        return False
    return True


def residual(pi: SteadyState | ArrayLike, P: ArrayLike) -> float:
    """Infinity norm of ``pi P - pi``."""
    vector = pi.probabilities if isinstance(pi, SteadyState) else np.asarray(pi, dtype=float)
    matrix = as_matrix(P)
    return float(np.max(np.abs(vector @ matrix - vector)))


def reachable_states(P: ArrayLike, start: int = 0) -> NDArray[np.intp]:
    """Sorted indices of the states reachable from ``start`` along positive transitions.

    The set is closed under ``P``, so the restricted matrix stays row stochastic.
    """
    matrix = as_matrix(P)
    graph = sparse.csr_matrix((matrix > 0.0).astype(float))
    order = csgraph.breadth_first_order(graph, start, directed=True, return_predecessors=False)
    return np.sort(np.asarray(order, dtype=np.intp))


def _solve_direct(matrix: NDArray[np.float64]) -> NDArray[np.float64]:
    n = matrix.shape[0]
    system = matrix.T - np.eye(n)
    system[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        return la.solve(system, rhs)
    except (la.LinAlgError, ValueError) as error:
        raise SolverError(f"balance equations are singular: {error}") from error


def _solve_gth(matrix: NDArray[np.float64]) -> NDArray[np.float64]:
    work = np.array(matrix, dtype=float, copy=True)
    n = work.shape[0]
    for i in range(n - 1):
        scale = work[i, i + 1 :].sum()
        if scale <= 0.0:
            # {0..i} already holds the single recurrent class
            n = i + 1
            break
        work[i + 1 : n, i] /= scale
        work[i + 1 : n, i + 1 : n] += np.outer(work[i + 1 : n, i], work[i, i + 1 : n])
    solution = np.zeros(work.shape[0])
    solution[n - 1] = 1.0
    for k in range(n - 2, -1, -1):
        solution[k] = solution[k + 1 : n] @ work[k + 1 : n, k]
    return solution / solution.sum()


def solve_steady_state(
    P: ArrayLike,
    *,
    method: SolveMethod = "direct",
    shape: tuple[int, int] | None = None,
    tol: float = RESIDUAL_TOL,
) -> SteadyState:
    """Solve ``pi P = pi, pi 1 = 1`` for a row-stochastic ``P`` with one recurrent class."""

    matrix = check_stochastic(P)
    if matrix.shape[0] == 1:
        return SteadyState(np.ones(1), shape)
    if method == "direct":
        vector = _solve_direct(matrix)
    elif method == "gth":
        vector = _solve_gth(matrix)
    else:
        raise ValueError(f"unknown steady-state method {method!r}")

    if not np.all(np.isfinite(vector)):
        raise SolverError("steady-state solve produced non-finite values")
    if vector.min() < -NEGATIVE_TOL:
        raise SolverError(f"steady-state solve produced a negative entry {vector.min():.3e}")
    vector = np.clip(vector, 0.0, None)
    vector = vector / vector.sum()
    error = residual(vector, matrix)
    if error > tol:
        raise SolverError(f"steady-state residual {error:.3e} exceeds {tol:.1e}", residual=error)
    return SteadyState(vector, shape)


def marginal(pi: SteadyState, axis: Axis) -> NDArray[np.float64]:
    """Sum a joint steady state over the other coordinate."""
    joint = pi.joint()
    if axis == "level":
        return joint.sum(axis=1)
    if axis == "phase":
        return joint.sum(axis=0)
    raise ShapeError(f"unknown axis {axis!r}")
