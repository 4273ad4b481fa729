import logging

import numpy as np
import pytest

from vnfchain.analysis.birth_death import BirthDeathParams, bd_steady_state, bd_transition_matrix, tail_ratio
from vnfchain.core.dtmc import residual, solve_steady_state


def test_closed_form_matches_matrix_solve_on_random_draws():
    rng = np.random.default_rng(2019)
    for _ in range(200):
        lam, mu = rng.uniform(1e-3, 1.0 - 1e-3, size=2)
        M = int(rng.integers(1, 26))
        params = BirthDeathParams(float(lam), float(mu), M)
        closed = bd_steady_state(params)
        oracle = solve_steady_state(bd_transition_matrix(params), method="gth")
        np.testing.assert_allclose(closed.probabilities, oracle.probabilities, rtol=0, atol=1e-10)


def test_closed_form_is_stationary():
    params = BirthDeathParams(0.37, 0.52, 12)
    state = bd_steady_state(params)
    assert residual(state, bd_transition_matrix(params)) <= 1e-12
    assert state.probabilities.sum() == pytest.approx(1.0, abs=1e-15)


def test_geometric_tail():
    params = BirthDeathParams(0.3, 0.5, 6)
    probabilities = bd_steady_state(params).probabilities
    ratios = probabilities[2:] / probabilities[1:-1]
    np.testing.assert_allclose(ratios, tail_ratio(params), rtol=1e-12)
    assert probabilities[1] / probabilities[0] == pytest.approx(0.3 / (0.7 * 0.5))


def test_no_arrivals_means_empty_queue():
    state = bd_steady_state(BirthDeathParams(0.0, 0.5, 4))
    np.testing.assert_array_equal(state.probabilities, [1.0, 0.0, 0.0, 0.0, 0.0])


def test_saturated_input_falls_back_to_matrix(caplog):
    caplog.set_level(logging.WARNING, logger="vnfchain")
    state = bd_steady_state(BirthDeathParams(1.0, 0.5, 3))
    np.testing.assert_allclose(state.probabilities, [0.0, 0.0, 0.0, 1.0], atol=1e-12)
    assert any("birth_death.matrix_fallback" in record.getMessage() for record in caplog.records)


def test_full_queue_keeps_arrival_only_on_departure():
    matrix = bd_transition_matrix(BirthDeathParams(0.4, 0.3, 2))
    # from full: down only when a task leaves and none arrives
    assert matrix[2, 1] == pytest.approx(0.6 * 0.3)
    assert matrix[2, 2] == pytest.approx(1.0 - 0.6 * 0.3)


@pytest.mark.parametrize("lam,mu,M", [(-0.1, 0.5, 3), (0.5, 0.0, 3), (0.5, 0.5, 0)])
def test_parameter_validation(lam, mu, M):
    with pytest.raises(ValueError):
        BirthDeathParams(lam, mu, M)


def test_balanced_small_queue_matches_hand_solution():
    state = bd_steady_state(BirthDeathParams(0.5, 0.5, 2))
    np.testing.assert_allclose(state.probabilities, [0.2, 0.4, 0.4], atol=1e-15)
    assert state.expectation() == pytest.approx(1.2, abs=1e-15)


def test_random_valid_queues_meet_residual_tolerance():
    rng = np.random.default_rng(11)
    for _ in range(100):
        lam = float(rng.uniform(0.05, 0.95))
        mu = float(rng.uniform(0.05, 1.0))
        params = BirthDeathParams(lam, mu, int(rng.integers(1, 31)))
        assert residual(bd_steady_state(params), bd_transition_matrix(params)) <= 1e-10
