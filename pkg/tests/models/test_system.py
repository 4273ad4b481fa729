import pytest

from vnfchain.core.errors import ParameterError
from vnfchain.models.system import FINITE_QUEUES, ROUTE_1, ROUTE_2, QueueId, SystemParams, validate


def test_valid_params_pass_through(fig3_params):
    assert validate(fig3_params) is fig3_params
    assert fig3_params.lambda1 == pytest.approx(0.4)
    assert fig3_params.lambda3 == pytest.approx(0.4)


def test_boundary_values_are_allowed(fig3_params):
    validate(fig3_params.replace(p=0.0, alpha=1.0))
    validate(fig3_params.replace(p=1, alpha=0, mu=(1.0,) * 6, buffer=(1,) * 5))


@pytest.mark.parametrize(
    "changes,field",
    [
        ({"p": 1.2}, "p"),
        ({"p": -0.1}, "p"),
        ({"alpha": float("nan")}, "alpha"),
        ({"alpha": True}, "alpha"),
        ({"mu": (0.5, 0.0, 0.5, 0.5, 0.5, 0.9)}, "mu2"),
        ({"mu": (0.5,) * 5}, "mu"),
        ({"buffer": (10, 0, 10, 10, 10)}, "M2"),
        ({"buffer": (10, 10, 10.0, 10, 10)}, "M3"),
        ({"buffer": (10, 10, 10, False, 10)}, "M4"),
        ({"buffer": (10,) * 6}, "buffer"),
    ],
)
def test_first_violation_is_named(fig3_params, changes, field):
    with pytest.raises(ParameterError) as excinfo:
        validate(fig3_params.replace(**changes))
    assert excinfo.value.field == field


def test_fields_checked_in_declaration_order(fig3_params):
    bad = fig3_params.replace(p=2.0, alpha=-1.0, buffer=(0,) * 5)
    with pytest.raises(ParameterError) as excinfo:
        validate(bad)
    assert excinfo.value.field == "p"


def test_topology():
    assert [q.role for q in QueueId] == [
        "processing",
        "transmission",
        "transmission",
        "processing",
        "transmission",
        "processing",
    ]
    assert ROUTE_1[-1] is ROUTE_2[-1] is QueueId.Q6
    assert QueueId.Q4.successor is QueueId.Q5
    assert QueueId.Q6.successor is None
    assert QueueId.Q6 not in FINITE_QUEUES


def test_flat_dict_and_accessors(fig3_params):
    flat = fig3_params.as_flat_dict()
    assert list(flat) == ["p", "alpha", "mu1", "mu2", "mu3", "mu4", "mu5", "mu6", "M1", "M2", "M3", "M4", "M5"]
    assert fig3_params.mu_of(QueueId.Q6) == 0.9
    assert fig3_params.capacity_of(2) == 10
    with pytest.raises(KeyError):
        fig3_params.capacity_of(QueueId.Q6)


def test_uniform_constructor():
    params = SystemParams.uniform(p=0.8, alpha=0.2, mu=0.45, mu6=0.9, capacity=10)
    assert params.mu == (0.45,) * 5 + (0.9,)
    assert params.buffer == (10,) * 5
