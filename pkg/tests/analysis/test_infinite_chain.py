import logging

import numpy as np
import pytest

from vnfchain.analysis import infinite_chain as ic
from vnfchain.core.errors import RepeatedPolesError, TruncationError, UnstableQueueError


def _random_inputs(rng: np.random.Generator) -> ic.Q6Inputs:
    mu6 = float(rng.uniform(0.1, 1.0))
    load = float(rng.uniform(0.05, 0.9))
    share = float(rng.uniform(0.0, 1.0))
    lambda6 = load * mu6
    return ic.Q6Inputs(lambda_62=share * lambda6, lambda_65=(1.0 - share) * lambda6, mu6=mu6)


def test_coefficients_are_probability_rows():
    coeffs = ic.hessenberg_coefficients(ic.Q6Inputs(0.3, 0.25, 0.8))
    assert sum(coeffs.a) == pytest.approx(1.0, abs=1e-15)
    assert sum(coeffs.b) == pytest.approx(1.0, abs=1e-15)
    assert coeffs.arrival_rate == pytest.approx(0.55)
    assert coeffs.service_rate == pytest.approx(0.8)


def test_ztransform_matches_truncated_oracle():
    rng = np.random.default_rng(42)
    for _ in range(50):
        coeffs = ic.hessenberg_coefficients(_random_inputs(rng))
        solution = ic.solve_ztransform(coeffs)
        oracle = ic.truncated_solve(coeffs, 10_000)
        assert solution.pi0 == ic.empty_probability(coeffs)
        assert ic.total_variation(solution.pmf(10_000), oracle.probabilities) <= 1e-8


def test_empty_probability_is_one_minus_load():
    rng = np.random.default_rng(3)
    for _ in range(20):
        inputs = _random_inputs(rng)
        pi0 = ic.empty_probability(ic.hessenberg_coefficients(inputs))
        assert pi0 == pytest.approx(1.0 - inputs.lambda6 / inputs.mu6, abs=1e-12)


def test_single_source_reduction():
    inputs = ic.Q6Inputs(lambda_62=0.4, lambda_65=0.0, mu6=0.8)
    solution = ic.solve_ztransform(ic.hessenberg_coefficients(inputs))
    assert solution.pi0 == pytest.approx(0.5, abs=1e-10)
    pmf = solution.pmf(6)
    ratio = 0.4 * 0.2 / (0.6 * 0.8)
    np.testing.assert_allclose(pmf[2:] / pmf[1:-1], ratio, rtol=1e-9)


def test_instant_service_with_one_feed_has_no_poles():
    solution = ic.solve_ztransform(ic.hessenberg_coefficients(ic.Q6Inputs(0.3, 0.0, 1.0)))
    assert solution.poles.size == 0
    np.testing.assert_allclose(solution.pmf(3), [0.7, 0.3, 0.0], atol=1e-14)
    assert solution.mean == pytest.approx(0.3)


def test_no_arrivals_keeps_queue_empty():
    solution = ic.solve_ztransform(ic.hessenberg_coefficients(ic.Q6Inputs(0.0, 0.0, 0.6)))
    assert solution.pi0 == pytest.approx(1.0)
    assert ic.q6_mean(solution) == pytest.approx(0.0, abs=1e-15)


def test_mean_methods_agree_with_oracle():
    coeffs = ic.hessenberg_coefficients(ic.Q6Inputs(0.35, 0.3, 0.9))
    solution = ic.solve_ztransform(coeffs)
    summation = ic.q6_mean(solution, method="summation")
    closed = ic.q6_mean(solution, method="closed")
    assert summation == pytest.approx(closed, rel=1e-8)
    oracle = ic.truncated_solve(coeffs, 10_000)
    assert summation == pytest.approx(oracle.expectation(), rel=1e-8)


def test_probabilities_are_a_distribution():
    solution = ic.solve_ztransform(ic.hessenberg_coefficients(ic.Q6Inputs(0.45, 0.4, 0.95)))
    pmf = solution.pmf(5_000)
    assert pmf.min() >= -1e-15
    assert pmf.sum() == pytest.approx(1.0, abs=1e-10)
    assert solution.prob(3) == pytest.approx(pmf[3], abs=1e-15)
    assert solution.prob(-1) == 0.0


@pytest.mark.parametrize("lambda_62,lambda_65,mu6", [(0.5, 0.4, 0.9), (0.6, 0.4, 0.9), (0.2, 0.0, 0.2)])
def test_stability_is_strict(lambda_62, lambda_65, mu6):
    inputs = ic.Q6Inputs(lambda_62, lambda_65, mu6)
    with pytest.raises(UnstableQueueError) as excinfo:
        ic.check_stability(inputs)
    assert excinfo.value.lambda6 == pytest.approx(lambda_62 + lambda_65)
    with pytest.raises(UnstableQueueError):
        ic.solve_ztransform(ic.hessenberg_coefficients(inputs))
    with pytest.raises(UnstableQueueError):
        ic.truncated_solve(ic.hessenberg_coefficients(inputs), 100)


def test_stability_margin_is_shared():
    # lambda6 a hair below mu6 is still within the solver's cancellation error
    inputs = ic.Q6Inputs(0.5, 0.5 - 1e-13, 1.0)
    assert not ic.is_stable(inputs.lambda6, inputs.mu6)
    with pytest.raises(UnstableQueueError):
        ic.check_stability(inputs)
    with pytest.raises(UnstableQueueError):
        ic.solve_ztransform(ic.hessenberg_coefficients(inputs))
    assert ic.is_stable(0.5, 0.9)


def test_batch_distribution():
    a0, a1, a2 = ic.arrival_batch_distribution(ic.Q6Inputs(0.3, 0.6, 0.95))
    assert a0 == pytest.approx(0.7 * 0.4)
    assert a1 == pytest.approx(0.3 * 0.4 + 0.6 * 0.7)
    assert a2 == pytest.approx(0.18)


def test_confluent_poles_fall_back_to_truncation(monkeypatch, caplog):
    caplog.set_level(logging.WARNING, logger="vnfchain")
    coeffs = ic.hessenberg_coefficients(ic.Q6Inputs(0.3, 0.3, 0.8))
    reference = ic.solve_ztransform(coeffs)

    def confluent(*_args, **_kwargs):
        raise RepeatedPolesError("poles coincide")

    monkeypatch.setattr(ic, "_expansion", confluent)
    fallback = ic.solve_ztransform(coeffs)
    assert fallback.method == "truncated"
    assert reference.method == "ztransform"
    assert ic.total_variation(fallback.pmf(1_000), reference.pmf(1_000)) <= 1e-8
    assert fallback.mean == pytest.approx(reference.mean, rel=1e-8)
    assert any("infinite_chain.fallback" in record.getMessage() for record in caplog.records)


def test_truncation_tail_check():
    coeffs = ic.hessenberg_coefficients(ic.Q6Inputs(0.45, 0.0, 0.5))
    with pytest.raises(TruncationError) as excinfo:
        ic.truncated_solve(coeffs, 20)
    assert excinfo.value.tail_mass > 1e-10
