import csv
import json

import pytest
from click.testing import CliRunner

from dqnl import __version__
from dqnl.cli import main


def write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture
def runner():
    return CliRunner()


def test_version(runner):
    res = runner.invoke(main, ["version"])
    assert res.exit_code == 0
    assert res.output.startswith(f"dqnl {__version__}")
    assert "kernel backend" in res.output


def test_validate_passes(runner):
    res = runner.invoke(main, ["validate"])
    assert res.exit_code == 0, res.output
    assert "0 failed" in res.output


def test_missing_config_file(runner, tmp_path):
    res = runner.invoke(main, ["run", "--config", str(tmp_path / "nope.toml")])
    assert res.exit_code != 0


@pytest.mark.parametrize("text", ['experiment = "prepare"\nbogus = 1', 'Delta = 0.3', 'experiment = '])
def test_bad_config_exits_nonzero(runner, tmp_path, text):
    res = runner.invoke(main, ["run", "--config", write(tmp_path, text), "--out", str(tmp_path / "o")])
    assert res.exit_code != 0
    assert "invalid config" in res.output


def test_negative_seed_rejected(runner, tmp_path):
    res = runner.invoke(main, ["run", "--config", write(tmp_path, 'experiment = "validate"'),
                               "--seed", "-1"])
    assert res.exit_code != 0


def test_failure_inside_experiment_is_reported(runner, tmp_path):
    cfg = write(tmp_path, 'experiment = "track_displacement"\nn_points = 32\nx_min = -0.7\nx_max = 0.7\n'
                          't_final = 2.0\nsample_dt = 1.0')
    res = runner.invoke(main, ["run", "--config", cfg, "--out", str(tmp_path / "o")])
    assert res.exit_code != 0
    assert "failed" in res.output


def run_twice(runner, tmp_path, text, files):
    cfg = write(tmp_path, text)
    outs = []
    for name in ("a", "b"):
        res = runner.invoke(main, ["run", "--config", cfg, "--out", str(tmp_path / name)])
        assert res.exit_code == 0, res.output
        outs.append({f: (tmp_path / name / f).read_bytes() for f in files + ["metadata.json"]})
    return outs


def test_ensemble_signal_run_is_byte_identical(runner, tmp_path):
    a, b = run_twice(runner, tmp_path, 'experiment = "ensemble_signal"\natoms_per_point = 500',
                     ["signal.csv", "spectrum.csv"])
    assert a == b
    meta = json.loads(a["metadata.json"])
    assert meta["config"]["experiment"] == "ensemble_signal"
    assert meta["files"] == ["signal.csv", "spectrum.csv"] or set(meta["files"]) >= {"signal.csv"}
    header = next(csv.reader(a["signal.csv"].decode().splitlines()))
    assert header == ["time", "signal"]


def test_classical_compare_run_is_byte_identical(runner, tmp_path):
    files = ["classical_delta_0.csv", "classical_delta_0.3.csv", "quantum_delta_0.csv", "quantum_delta_0.3.csv"]
    a, b = run_twice(runner, tmp_path, 'experiment = "classical_compare"\nn_trajectories = 300\n'
                                       't_final = 4.0\nsample_dt = 0.5', files)
    assert a == b
    assert a["classical_delta_0.csv"] == a["classical_delta_0.3.csv"]


def test_seed_override_changes_classical_output(runner, tmp_path):
    cfg = write(tmp_path, 'experiment = "classical_compare"\nn_trajectories = 100\nt_final = 1.0\nsample_dt = 0.5')
    for seed in ("1", "2"):
        res = runner.invoke(main, ["run", "--config", cfg, "--out", str(tmp_path / seed), "--seed", seed])
        assert res.exit_code == 0, res.output
    assert (tmp_path / "1" / "classical_delta_0.csv").read_bytes() != \
        (tmp_path / "2" / "classical_delta_0.csv").read_bytes()
    assert json.loads((tmp_path / "2" / "metadata.json").read_text())["seed"] == 2


def test_track_displacement_run(runner, tmp_path):
    cfg = write(tmp_path, 'experiment = "track_displacement"\nt_final = 5.0\nsample_dt = 1.0')
    res = runner.invoke(main, ["run", "--config", cfg, "--out", str(tmp_path / "o")])
    assert res.exit_code == 0, res.output
    rows = list(csv.reader(open(tmp_path / "o" / "displacement.csv")))
    assert rows[0] == ["time", "re_D", "im_D", "abs_D"]
    assert len(rows) == 7
    assert abs(float(rows[-1][3]) - 0.5) < 1e-4
