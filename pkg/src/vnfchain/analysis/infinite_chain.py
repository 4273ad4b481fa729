"""Subsystem 4: the unbounded core queue Q6 fed by Q2 and Q5.

Q6 receives 0, 1 or 2 tasks per slot from two independent Bernoulli feeds and
serves one task with probability ``mu6`` when non-empty. The chain is of
M/G/1 type (one step down, up to two steps up), solved with the z-transform

    Pi(w) = pi0 * (w A(w) - B(w)) / (w - B(w)),   w = 1/z,

whose rational part is expanded into residues, poles and direct terms. A
truncated chain with a reflecting last state serves as an independent oracle and
as the fallback when poles coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.signal as signal
import scipy.sparse as sparse
import scipy.sparse.linalg as sla
from numpy.polynomial import polynomial as P
from numpy.typing import NDArray

from vnfchain.core.dtmc import SteadyState
from vnfchain.core.errors import RepeatedPolesError, SolverError, TruncationError, UnstableQueueError
from vnfchain.services.logging import get_logger

_logger = get_logger("vnfchain.analysis.infinite_chain")

REPEATED_POLE_TOL = 1e-9
TAIL_MASS_TOL = 1e-10
COEFFICIENT_TRIM_TOL = 1e-15
SUMMATION_TOL = 1e-16
MAX_SUMMATION_TERMS = 1_000_000
FALLBACK_START = 1_000
FALLBACK_LIMIT = 100_000
# service_rate is recovered from the b coefficients with cancellation error
STABILITY_MARGIN = 1e-12

MeanMethod = Literal["summation", "closed"]


@dataclass(frozen=True, slots=True)
class Q6Inputs:
    """Per-slot feed probabilities from Q2 and Q5 and the service probability of Q6."""

    lambda_62: float
    lambda_65: float
    mu6: float

    @property
    def lambda6(self) -> float:
        return self.lambda_62 + self.lambda_65


@dataclass(frozen=True, slots=True)
class HessenbergCoefficients:
    """Transition probabilities of the Q6 chain.

    ``a_k`` moves an empty queue to state k; ``b_k`` moves state ``n >= 1`` to ``n - 1 + k``.
    """

    a0: float
    a1: float
    a2: float
    b0: float
    b1: float
    b2: float
    b3: float

    @property
    def a(self) -> tuple[float, float, float]:
        return (self.a0, self.a1, self.a2)

    @property
    def b(self) -> tuple[float, float, float, float]:
        return (self.b0, self.b1, self.b2, self.b3)

    def a_prime(self) -> float:
        """dA/dz at z = 1 with ``A(z) = sum a_i z^-i``."""
        return -(self.a1 + 2.0 * self.a2)

    def b_prime(self) -> float:
        """dB/dz at z = 1 with ``B(z) = sum b_i z^-i``."""
        return -(self.b1 + 2.0 * self.b2 + 3.0 * self.b3)

    @property
    def arrival_rate(self) -> float:
        return self.a1 + 2.0 * self.a2

    @property
    def service_rate(self) -> float:
        # mean drift of an occupied state is arrival_rate - mu6 = -(1 + B'(1))
        return self.arrival_rate + 1.0 + self.b_prime()


@dataclass(frozen=True, slots=True)
class Q6Solution:
    """Stationary law of Q6.

    For ``i > 0``, ``pi_i = c_i + sum_j r_j p_j^(i-1)`` with residues ``r``, poles ``p`` and
    direct terms ``c`` (``c_i = 0`` beyond the stored terms). When the expansion is not
    usable, ``fallback`` holds a truncated stationary vector instead.
    """

    pi0: float
    residues: NDArray[np.complex128]
    poles: NDArray[np.complex128]
    direct: NDArray[np.float64]
    mean: float
    fallback: NDArray[np.float64] | None = field(default=None)

    @property
    def method(self) -> str:
        return "truncated" if self.fallback is not None else "ztransform"

    def prob(self, i: int) -> float:
        if i < 0:
            return 0.0
        if self.fallback is not None:
            return float(self.fallback[i]) if i < self.fallback.size else 0.0
        if i == 0:
            return self.pi0
        value = complex(self.direct[i]) if i < self.direct.size else 0.0
        value += complex(np.sum(self.residues * self.poles ** (i - 1)))
        return float(value.real)

    def pmf(self, n: int) -> NDArray[np.float64]:
        """The first ``n`` stationary probabilities."""
        if self.fallback is not None:
            out = np.zeros(n)
            count = min(n, self.fallback.size)
            out[:count] = self.fallback[:count]
            return out
        return _expansion_pmf(self.pi0, self.residues, self.poles, self.direct, n)


def _expansion_pmf(
    pi0: float,
    residues: NDArray[np.complex128],
    poles: NDArray[np.complex128],
    direct: NDArray[np.float64],
    n: int,
) -> NDArray[np.float64]:
    out = np.zeros(n, dtype=complex)
    if n == 0:
        return out.real
    if poles.size:
        exponents = np.arange(n - 1)
        out[1:] = (residues[None, :] * poles[None, :] ** exponents[:, None]).sum(axis=1)
    count = min(n, direct.size)
    out[1:count] += direct[1:count]
    out[0] = pi0
    return out.real.copy()


# ---------------------------------------------------------------------- inputs and stability
def q6_arrivals(pi1: SteadyState, pi3: SteadyState, mu2: float, mu5: float, *, mu6: float) -> Q6Inputs:
    """Feed probabilities ``Pr{Q2 > 0} mu2`` and ``Pr{Q5 > 0} mu5``."""
    phases = pi1.joint().sum(axis=0)
    busy_q2 = float(phases[1:].sum())
    busy_q5 = float(pi3.probabilities[1:].sum())
    return Q6Inputs(lambda_62=busy_q2 * mu2, lambda_65=busy_q5 * mu5, mu6=mu6)


def is_stable(lambda6: float, mu6: float) -> bool:
    """Loynes condition ``lambda6 < mu6``, strict by :data:`STABILITY_MARGIN`."""
    return lambda6 < mu6 - STABILITY_MARGIN


def check_stability(inputs: Q6Inputs) -> Q6Inputs:
    if not is_stable(inputs.lambda6, inputs.mu6):
        raise UnstableQueueError(inputs.lambda6, inputs.mu6)
    return inputs


def hessenberg_coefficients(inputs: Q6Inputs) -> HessenbergCoefficients:
    l2, l5, mu = inputs.lambda_62, inputs.lambda_65, inputs.mu6
    n2, n5, nmu = 1.0 - l2, 1.0 - l5, 1.0 - mu
    return HessenbergCoefficients(
        a0=n2 * n5,
        a1=l2 * n5 + l5 * n2,
        a2=l2 * l5,
        b0=n2 * n5 * mu,
        b1=n5 * n2 * nmu + n5 * l2 * mu + l5 * n2 * mu,
        b2=l2 * n5 * nmu + n2 * l5 * nmu + l2 * l5 * mu,
        b3=l2 * l5 * nmu,
    )


def arrival_batch_distribution(inputs: Q6Inputs) -> tuple[float, float, float]:
    """Probabilities of 0, 1 and 2 tasks reaching Q6 in one slot."""
    coeffs = hessenberg_coefficients(inputs)
    return coeffs.a


def _require_stable(coeffs: HessenbergCoefficients) -> None:
    if not is_stable(coeffs.arrival_rate, coeffs.service_rate):
        raise UnstableQueueError(coeffs.arrival_rate, coeffs.service_rate)


# ---------------------------------------------------------------------- z-transform path
def empty_probability(coeffs: HessenbergCoefficients) -> float:
    """``pi0 = (1 + B'(1)) / (1 + B'(1) - A'(1))``."""
    b_prime = coeffs.b_prime()
    return (1.0 + b_prime) / (1.0 + b_prime - coeffs.a_prime())


def _deflate(ascending: NDArray[np.float64]) -> NDArray[np.float64]:
    """Divide out the root at ``w = 1`` shared by numerator and denominator."""
    quotient, _ = P.polydiv(ascending, np.array([-1.0, 1.0]))
    return P.polytrim(quotient, tol=COEFFICIENT_TRIM_TOL)


def _expansion(coeffs: HessenbergCoefficients, pi0: float) -> tuple[
    NDArray[np.complex128], NDArray[np.complex128], NDArray[np.float64]
]:
    a0, a1, a2 = coeffs.a
    b0, b1, b2, b3 = coeffs.b
    numerator = pi0 * np.array([-b0, a0 - b1, a1 - b2, a2 - b3])
    denominator = np.array([-b0, 1.0 - b1, -b2, -b3])
    num = _deflate(P.polytrim(numerator, tol=COEFFICIENT_TRIM_TOL))
    den = _deflate(P.polytrim(denominator, tol=COEFFICIENT_TRIM_TOL))

    if den.size == 1:
        direct = np.asarray(num / den[0], dtype=float)
        return np.zeros(0, dtype=complex), np.zeros(0, dtype=complex), direct

    poles = 1.0 / P.polyroots(den).astype(complex)
    if poles.size > 1:
        gaps = np.abs(poles[:, None] - poles[None, :])[np.triu_indices(poles.size, k=1)]
        if gaps.min() < REPEATED_POLE_TOL:
            raise RepeatedPolesError(f"poles {poles} are closer than {REPEATED_POLE_TOL:g}")
    if np.any(np.abs(poles) >= 1.0):
        raise SolverError(f"pole outside the unit disk: {poles}")

    # residuez expands b(z^-1)/a(z^-1) as sum r / (1 - p z^-1) + sum k_i z^-i
    residues, found, direct = signal.residuez(num, den, tol=REPEATED_POLE_TOL)
    found = np.asarray(found, dtype=complex)
    residues = np.asarray(residues, dtype=complex)
    direct = np.real_if_close(np.asarray(direct, dtype=complex)).real.astype(float)
    # shift to the pi_i = c_i + sum r_j p_j^(i-1) convention
    return residues * found, found, direct


def solve_ztransform(coeffs: HessenbergCoefficients) -> Q6Solution:
    """Stationary law of Q6 from the z-transform; falls back to truncation on confluent poles."""

    _require_stable(coeffs)
    pi0 = empty_probability(coeffs)
    try:
        residues, poles, direct = _expansion(coeffs, pi0)
    except SolverError as error:
        _logger.warning("infinite_chain.fallback", reason=str(error), lambda6=coeffs.arrival_rate)
        return _fallback_solution(coeffs, pi0)

    mean = _summation_mean(pi0, residues, poles, direct)
    closed = _closed_form_mean(residues, poles, direct)
    if abs(mean - closed) > 1e-8 * max(1.0, abs(mean)):
        _logger.warning("infinite_chain.mean_mismatch", summation=mean, closed=closed)
    return Q6Solution(pi0=pi0, residues=residues, poles=poles, direct=direct, mean=mean)


def _fallback_solution(coeffs: HessenbergCoefficients, pi0: float) -> Q6Solution:
    size = FALLBACK_START
    while True:
        try:
            state = truncated_solve(coeffs, size)
            break
        except TruncationError:
            if size >= FALLBACK_LIMIT:
                raise
            size = min(size * 2, FALLBACK_LIMIT)
    vector = state.probabilities
    return Q6Solution(
        pi0=float(vector[0]),
        residues=np.zeros(0, dtype=complex),
        poles=np.zeros(0, dtype=complex),
        direct=np.zeros(0),
        mean=float(np.arange(vector.size) @ vector),
        fallback=np.array(vector),
    )


def _summation_terms(poles: NDArray[np.complex128], direct: NDArray[np.float64]) -> int:
    if poles.size == 0:
        return max(direct.size, 1)
    radius = float(np.max(np.abs(poles)))
    if radius == 0.0:
        return max(direct.size, 2)
    needed = math.ceil(math.log(SUMMATION_TOL) / math.log(radius)) + direct.size + 1
    return int(min(max(needed, direct.size + 1), MAX_SUMMATION_TERMS))


def _summation_mean(
    pi0: float,
    residues: NDArray[np.complex128],
    poles: NDArray[np.complex128],
    direct: NDArray[np.float64],
) -> float:
    terms = _summation_terms(poles, direct)
    probabilities = _expansion_pmf(pi0, residues, poles, direct, terms)
    return float(np.arange(terms) @ probabilities)


def _closed_form_mean(
    residues: NDArray[np.complex128],
    poles: NDArray[np.complex128],
    direct: NDArray[np.float64],
) -> float:
    # sum_{i>=1} i r p^(i-1) = r / (1 - p)^2
    series = complex(np.sum(residues / (1.0 - poles) ** 2)) if poles.size else 0.0
    direct_part = float(np.arange(direct.size)[1:] @ direct[1:]) if direct.size > 1 else 0.0
    return float(series.real) + direct_part


def q6_mean(solution: Q6Solution, *, method: MeanMethod = "summation") -> float:
    """Mean occupancy ``sum_i i pi_i``; the two methods agree within 1e-8."""
    if method == "summation" or solution.fallback is not None:
        return solution.mean
    if method == "closed":
        return _closed_form_mean(solution.residues, solution.poles, solution.direct)
    raise ValueError(f"unknown mean method {method!r}")


# ---------------------------------------------------------------------- truncated oracle
def _truncated_matrix(coeffs: HessenbergCoefficients, size: int) -> sparse.csr_matrix:
    last = size - 1
    rows: list[NDArray[np.int64]] = []
    cols: list[NDArray[np.int64]] = []
    data: list[NDArray[np.float64]] = []

    rows.append(np.zeros(3, dtype=np.int64))
    cols.append(np.minimum(np.arange(3), last))
    data.append(np.array(coeffs.a))

    occupied = np.arange(1, size, dtype=np.int64)
    for step, value in enumerate(coeffs.b):
        rows.append(occupied)
        cols.append(np.minimum(occupied - 1 + step, last))
        data.append(np.full(occupied.size, value))

    matrix = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    )
    return matrix.tocsr()


def truncated_solve(coeffs: HessenbergCoefficients, N: int) -> SteadyState:
    """Stationary vector of the chain truncated to states ``0..N-1``.

    Transitions past ``N - 1`` are folded into the last state. Raises
    :class:`TruncationError` when a geometric tail estimate exceeds 1e-10.
    """

    _require_stable(coeffs)
    if N < 3:
        raise ValueError(f"truncation needs at least 3 states, got {N}")
    if coeffs.arrival_rate == 0.0:
        point = np.zeros(N)
        point[0] = 1.0
        return SteadyState(point)

    matrix = _truncated_matrix(coeffs, N)
    generator = (matrix.T - sparse.identity(N, format="csr")).tocsc()
    # pin pi_0 = 1 and drop the (redundant) balance equation of state 0
    reduced = generator[1:, 1:]
    rhs = -generator[1:, 0].toarray().ravel()
    try:
        tail = sla.spsolve(reduced, rhs)
    except RuntimeError as error:
        raise SolverError(f"truncated chain is singular: {error}") from error
    vector = np.concatenate(([1.0], np.asarray(tail, dtype=float)))
    if not np.all(np.isfinite(vector)):
        raise SolverError("truncated solve produced non-finite values")
    vector = np.clip(vector, 0.0, None)
    vector /= vector.sum()

    tail_mass = _tail_mass(vector)
    if tail_mass > TAIL_MASS_TOL:
        raise TruncationError(
            f"truncation at N={N} leaves tail mass {tail_mass:.3e}", tail_mass=tail_mass
        )
    return SteadyState(vector)


def _tail_mass(vector: NDArray[np.float64]) -> float:
    size = vector.size
    last = float(vector[-1])
    if last == 0.0:
        return 0.0
    anchor = max(size - 6, 1)
    if vector[anchor - 1] <= 0.0:
        return last
    ratio = float(vector[anchor] / vector[anchor - 1])
    if ratio >= 1.0:
        return math.inf
    return last / (1.0 - ratio)


def total_variation(left: NDArray[np.float64], right: NDArray[np.float64]) -> float:
    size = max(left.size, right.size)
    a = np.zeros(size)
    b = np.zeros(size)
    a[: left.size] = left
    b[: right.size] = right
    return 0.5 * float(np.abs(a - b).sum())
