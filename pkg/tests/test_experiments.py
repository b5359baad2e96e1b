import json
import math

import pytest

from dqnl.config import RunConfig, from_mapping
from dqnl.experiments import ExperimentError, derived_quantities, run_experiment


def test_derived_scales_for_rb87():
    d = derived_quantities(RunConfig(experiment="prepare"))
    assert d["omega"] == pytest.approx(2 * math.sqrt(35))
    assert d["omega_hz"] == pytest.approx(42.24e3, rel=1e-3)
    assert d["l0_nm"] == pytest.approx(52.35, rel=1e-3)
    assert d["L_over_l0"] == pytest.approx(7.641, rel=1e-3)
    assert d["t_delta_times_omega"] == pytest.approx(8.0)
    assert d["t_delta_us"] == pytest.approx(30.1, rel=1e-2)
    assert d["timing_window_satisfied"]
    assert d["oscillation_period"] == pytest.approx(2 * math.pi / 0.3)


def test_timing_window_flags_violation():
    d = derived_quantities(RunConfig(experiment="prepare", t_delta=0.05))
    assert not d["timing_window_satisfied"]
    d0 = derived_quantities(RunConfig(experiment="prepare", Delta=0.0))
    assert d0["timing_window"][1] is None and d0["oscillation_period"] is None


def test_metadata_reproduces_the_run(tmp_path):
    cfg = RunConfig(experiment="ensemble_signal", well_layout="random", seed=5, atoms_per_point=100)
    run_experiment(cfg, str(tmp_path / "a"))
    meta = json.loads((tmp_path / "a" / "metadata.json").read_text())
    again = from_mapping({k: v for k, v in meta["config"].items()})
    assert again == cfg
    run_experiment(again, str(tmp_path / "b"))
    for name in meta["files"] + ["metadata.json"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert meta["results"]["peak_offset_bins"] == pytest.approx(
        (meta["results"]["peak_freq"] - 0.3) / meta["resolved"]["bin_width"])


def test_ramsey_scan_protocol_matches_direct(tmp_path):
    cfg = RunConfig(experiment="ramsey_scan", t_final=4.0, sample_dt=1.0)
    res = run_experiment(cfg, str(tmp_path))
    assert res["max_protocol_mismatch"] < 1e-10


def test_runner_errors_are_wrapped(tmp_path):
    cfg = RunConfig(experiment="track_displacement", n_points=32, x_min=-0.7, x_max=0.7,
                    t_final=2.0, sample_dt=1.0)
    with pytest.raises(ExperimentError, match="domain edge"):
        run_experiment(cfg, str(tmp_path))
