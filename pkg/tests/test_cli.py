import pandas as pd
import pytest

from vnfchain import cli
from vnfchain.models.metrics import METRIC_COLUMNS


@pytest.fixture
def fig3(configs_dir):
    return str(configs_dir / "fig3.toml")


def _data(path):
    return pd.read_csv(path, comment="#")


def test_analyze_prints_report(fig3, capsys):
    assert cli.main(["analyze", "--config", fig3]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "P_D (tasks/slot)" in out


def test_analyze_writes_csv(fig3, tmp_path):
    out = tmp_path / "analyze.csv"
    assert cli.main(["analyze", "--config", fig3, "--out", str(out)]) == cli.EXIT_OK
    text = out.read_text(encoding="utf-8")
    assert "# command = analyze" in text
    assert "# config = fig3" in text
    data = _data(out)
    assert list(data.columns) == ["alpha", "stable", "lambda6", *METRIC_COLUMNS]
    assert data.loc[0, "alpha"] == 0.5


def test_single_route_has_no_route_two_load(fig3, tmp_path):
    out = tmp_path / "route1.csv"
    assert cli.main(["analyze", "--config", fig3, "--alpha", "1.0", "--out", str(out)]) == cli.EXIT_OK
    data = _data(out)
    for column in ("P_D3", "P_D4", "P_D5", "Qbar3", "Qbar4", "Qbar5"):
        assert data.loc[0, column] == 0.0


def test_unstable_configuration_exits_two(fig3, capsys):
    args = ["analyze", "--config", fig3, "--p", "0.9", "--set", "mu6=0.3"]
    for mu in range(1, 6):
        args += ["--set", f"mu{mu}=0.9"]
    assert cli.main(args) == cli.EXIT_UNSTABLE
    captured = capsys.readouterr()
    assert "unstable" in captured.err
    assert "Q6 is unstable" in captured.out


def test_boundary_load_exits_two(fig3, capsys):
    args = ["analyze", "--config", fig3, "--p", "1.0", "--alpha", "0.9"]
    for mu in range(1, 7):
        args += ["--set", f"mu{mu}=1.0"]
    assert cli.main(args) == cli.EXIT_UNSTABLE
    assert "unstable" in capsys.readouterr().err


def test_bad_config_exits_one(tmp_path, capsys):
    broken = tmp_path / "broken.toml"
    broken.write_text("p = 0.8\n", encoding="utf-8")
    assert cli.main(["analyze", "--config", str(broken)]) == cli.EXIT_ERROR
    assert "error:" in capsys.readouterr().err


def test_missing_config_uses_environment(monkeypatch, fig3):
    monkeypatch.delenv("VNFCHAIN_CONFIG", raising=False)
    assert cli.main(["analyze"]) == cli.EXIT_ERROR
    monkeypatch.setenv("VNFCHAIN_CONFIG", fig3)
    assert cli.main(["analyze"]) == cli.EXIT_OK


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        ["analyze", "--set", "mu3"],
        ["analyze", "--set", "mu9=0.1"],
        ["analyze", "--alpha", "1.5"],
        ["sweep", "--objective", "latency"],
        ["sweep", "--step", "0"],
        ["sweep", "--objective", "weighted"],
        ["compare", "--alphas", ""],
        ["simulate", "--slots", "10", "--warmup", "10"],
        ["region", "--mus", "0.5,x", "--capacities", "5"],
    ],
)
def test_usage_errors_exit_one(fig3, argv):
    assert cli.main([*argv, "--config", fig3] if argv[0] != "nonsense" else argv) == cli.EXIT_ERROR


def test_simulation_csv_is_reproducible(fig3, tmp_path):
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        args = ["simulate", "--config", fig3, "--slots", "3000", "--warmup", "100", "--seed", "5", "--out", str(out)]
        assert cli.main(args) == cli.EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    text = outputs[0].decode("utf-8")
    assert "# seed = 5" in text
    assert "# rng = numpy.PCG64" in text
    assert _data(tmp_path / "a.csv").loc[0, "accounting_residual"] == 0


def test_replications_report_intervals(fig3, tmp_path):
    out = tmp_path / "runs.csv"
    args = ["simulate", "--config", fig3, "--slots", "2000", "--warmup", "100", "--runs", "3", "--jobs", "1",
            "--out", str(out)]
    assert cli.main(args) == cli.EXIT_OK
    data = _data(out)
    assert list(data.columns) == ["metric", "mean", "std", "ci_half_width"]
    assert data["metric"].tolist() == list(METRIC_COLUMNS)


def test_compare_rows_per_alpha(fig3, tmp_path):
    out = tmp_path / "compare.csv"
    args = ["compare", "--config", fig3, "--alphas", "0.2,0.8", "--slots", "3000", "--warmup", "100",
            "--jobs", "1", "--out", str(out)]
    assert cli.main(args) == cli.EXIT_OK
    data = _data(out)
    assert data["alpha"].tolist() == [0.2, 0.8]
    assert (data["P_D_abs_err"] >= 0).all()


def test_sweep_marks_optimum_and_front(fig3, tmp_path):
    out = tmp_path / "sweep.csv"
    assert cli.main(["sweep", "--config", fig3, "--step", "0.25", "--out", str(out)]) == cli.EXIT_OK
    data = _data(out)
    assert data["alpha"].tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert data["optimal"].sum() == 1
    assert data["pareto"].any()
    assert "# objective = drop" in out.read_text(encoding="utf-8")


def test_weighted_sweep(fig3, capsys):
    argv = ["sweep", "--config", fig3, "--step", "0.5", "--objective", "weighted", "--weight", "0.5"]
    assert cli.main(argv) == cli.EXIT_OK
    assert "weighted(0.5)" in capsys.readouterr().out


def test_region_to_stdout(fig3, capsys):
    argv = ["region", "--config", fig3, "--mus", "0.3,0.6", "--capacities", "5", "--out", "-"]
    assert cli.main(argv) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("# schema = ")
    assert "Performance region" not in out
    assert "mu,M,throughput,delay,P_D,stable" in out


def test_surface_grid(fig3, tmp_path):
    out = tmp_path / "surface.csv"
    argv = ["surface", "--config", fig3, "--mu-step", "0.5", "--step", "0.5", "--out", str(out)]
    assert cli.main(argv) == cli.EXIT_OK
    data = _data(out)
    assert len(data) == 4
    assert set(data["alpha_opt"]) <= {0.0, 0.5, 1.0}
