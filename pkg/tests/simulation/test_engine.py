import numpy as np
import pytest

from vnfchain.analysis import infinite_chain
from vnfchain.analysis.pipeline import analyze, analyze_detailed
from vnfchain.core.dtmc import marginal
from vnfchain.models.simulation import SimConfig
from vnfchain.models.system import SystemParams
from vnfchain.simulation import engine
from vnfchain.simulation.rng import StreamId

SHORT = SimConfig(slots=20_000, warmup=1_000, seed=7)


def _assert_flows_balance(result):
    accepted, dropped, departures = result.accepted, result.dropped, result.departures
    assert sum(result.routed) == result.offered
    assert result.routed[0] == accepted[0] + dropped[0]
    assert result.routed[1] == accepted[2] + dropped[2]
    assert departures[0] == accepted[1] + dropped[1]
    assert departures[2] == accepted[3] + dropped[3]
    assert departures[3] == accepted[4] + dropped[4]
    assert departures[1] + departures[4] == accepted[5]
    n0, n1, n2 = result.q6_batches
    assert n0 + n1 + n2 == result.measured_slots
    assert n1 + 2 * n2 == accepted[5]
    for histogram in result.histograms:
        assert histogram.sum() == result.measured_slots


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.5, 1.0])
def test_every_task_is_accounted_for(fig3_params, alpha):
    result = engine.simulate(fig3_params.with_alpha(alpha), SHORT)
    assert result.accounting_residual == 0
    _assert_flows_balance(result)


def test_heavy_load_still_balances():
    params = SystemParams(p=1.0, alpha=0.5, mu=(0.3, 0.2, 0.3, 0.2, 0.1, 0.35), buffer=(2, 1, 3, 1, 2))
    result = engine.simulate(params, SHORT)
    assert result.accounting_residual == 0
    assert result.total_drops > 0
    _assert_flows_balance(result)


def test_same_stream_reproduces_run(fig3_params):
    first = engine.simulate(fig3_params, SHORT)
    second = engine.simulate(fig3_params, SHORT)
    assert first.to_record() == second.to_record()
    for a, b in zip(first.histograms, second.histograms):
        np.testing.assert_array_equal(a, b)
    other = engine.simulate(fig3_params, SimConfig(slots=20_000, warmup=1_000, seed=8))
    assert other.to_record() != first.to_record()


def test_streams_differ_by_run_index(fig3_params):
    a = engine.simulate(fig3_params, SHORT, stream=StreamId(seed=7, run=0))
    b = engine.simulate(fig3_params, SHORT, stream=StreamId(seed=7, run=1))
    assert a.stream.endswith("/run0")
    assert a.to_record() != b.to_record()


def test_block_size_does_not_change_results(fig3_params, monkeypatch):
    # warmup 336 ends exactly on a 7-slot block boundary, 333 falls inside one
    for warmup in (333, 336):
        config = SimConfig(slots=5_000, warmup=warmup, seed=11)
        reference = engine.simulate(fig3_params, config)
        for block in (7, 64):
            monkeypatch.setattr(engine, "BLOCK_SLOTS", block)
            result = engine.simulate(fig3_params, config)
            assert result.to_record() == reference.to_record()
            assert result.initial_occupancy == reference.initial_occupancy
            for a, b in zip(result.histograms, reference.histograms):
                np.testing.assert_array_equal(a, b)
        monkeypatch.undo()


def test_warmup_zero_starts_empty(fig3_params):
    result = engine.simulate(fig3_params, SimConfig(slots=2_000, warmup=0, seed=3))
    assert result.initial_occupancy == 0
    assert result.accounting_residual == 0


def test_no_traffic_keeps_network_empty(fig3_params):
    result = engine.simulate(fig3_params.replace(p=0.0), SHORT)
    assert result.offered == 0
    assert result.total_drops == 0
    assert result.metrics.drop_total == 0.0
    assert result.metrics.mean_total == 0.0
    assert result.metrics.delay is None


def test_instant_service_never_drops():
    params = SystemParams(p=1.0, alpha=1.0, mu=(1.0,) * 6, buffer=(1,) * 5)
    result = engine.simulate(params, SimConfig(slots=1_000, warmup=10, seed=1))
    assert result.dropped == (0, 0, 0, 0, 0)
    assert result.offered == result.measured_slots
    assert result.system_departures == result.measured_slots
    # one task sits in Q1, Q2 and Q6 at the end of every slot
    assert result.histograms[0][1] == result.measured_slots
    assert result.histograms[1][1] == result.measured_slots
    assert result.metrics.mean_len_per_queue[5] == pytest.approx(1.0)


def test_departures_free_space_before_arrivals():
    params = SystemParams(p=1.0, alpha=1.0, mu=(1.0, 0.05, 0.5, 0.5, 0.5, 0.9), buffer=(1, 1, 1, 1, 1))
    result = engine.simulate(params, SimConfig(slots=10_000, warmup=100, seed=5))
    assert result.dropped[0] == 0
    assert result.dropped[1] > 0
    assert result.departures[0] == result.measured_slots


def test_q6_histogram_cap(fig3_params):
    uncapped = engine.simulate(fig3_params, SHORT)
    capped = engine.simulate(fig3_params, SimConfig(slots=SHORT.slots, warmup=SHORT.warmup, seed=SHORT.seed, q6_cap=2))
    assert capped.histograms[5].size <= 3
    assert capped.histograms[5].sum() == capped.measured_slots
    assert capped.metrics.mean_len_per_queue[5] == uncapped.metrics.mean_len_per_queue[5]
    np.testing.assert_array_equal(capped.histograms[5][:2], uncapped.histograms[5][:2])


def test_histogram_means_match_metrics(fig3_params):
    result = engine.simulate(fig3_params, SHORT)
    for queue in range(1, 7):
        distribution = result.occupancy_distribution(queue)
        expected = float(np.arange(distribution.size) @ distribution)
        assert result.metrics.mean_len_per_queue[queue - 1] == pytest.approx(expected, rel=1e-12)


def test_run_logs_completion(fig3_params, stub_logger):
    result = engine.simulate(fig3_params, SimConfig(slots=2_000, warmup=0, seed=5), logger=stub_logger)
    (complete,) = stub_logger.named("simulate.run.complete")
    assert complete["slots"] == 2_000
    assert complete["drop_total"] == result.metrics.drop_total
    assert stub_logger.named("telemetry.span.finish")[-1]["span"] == "simulate.run"


@pytest.mark.parametrize("slots,warmup", [(0, 0), (10, 10), (10, -1)])
def test_invalid_config(slots, warmup):
    with pytest.raises(ValueError):
        SimConfig(slots=slots, warmup=warmup)


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_decomposition_tracks_simulation(fig3_params, alpha):
    params = fig3_params.with_alpha(alpha)
    simulated = engine.simulate(params, SimConfig(slots=1_000_000, warmup=10_000, seed=20190417))
    computed = analyze(params)
    assert abs(computed.drop_total - simulated.metrics.drop_total) <= 0.01
    tolerance = max(0.5, 0.1 * simulated.metrics.mean_total)
    assert abs(computed.mean_total - simulated.metrics.mean_total) <= tolerance


@pytest.mark.slow
def test_q6_batches_follow_feeding_rates(fig3_params):
    result = engine.simulate(fig3_params, SimConfig(slots=1_000_000, warmup=10_000, seed=99))
    inputs = infinite_chain.Q6Inputs(
        lambda_62=result.departure_rate(2), lambda_65=result.departure_rate(5), mu6=fig3_params.mu[5]
    )
    expected = infinite_chain.arrival_batch_distribution(inputs)
    np.testing.assert_allclose(result.batch_distribution(), expected, atol=0.005)


@pytest.mark.slow
def test_subsystem_rates_match_simulation(fig3_params):
    detail = analyze_detailed(fig3_params)
    result = engine.simulate(fig3_params, SimConfig(slots=1_000_000, warmup=10_000, seed=12))
    assert detail.tandem1.lambda_out == pytest.approx(result.departure_rate(1), abs=0.01)
    assert detail.q6_inputs.lambda6 == pytest.approx(result.accepted[5] / result.measured_slots, abs=0.01)


@pytest.mark.slow
def test_subsystem_one_marginals_match_histograms(fig3_params):
    detail = analyze_detailed(fig3_params)
    result = engine.simulate(fig3_params, SimConfig(slots=1_000_000, warmup=10_000, seed=31))
    for queue, axis in ((1, "level"), (2, "phase")):
        computed = marginal(detail.pi1, axis)
        np.testing.assert_allclose(result.occupancy_distribution(queue), computed, atol=0.01)
