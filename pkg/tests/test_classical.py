import csv
import math

import numpy as np
import pytest

from dqnl.classical import (
    ClassicalDomainError,
    ClassicalEnsemble,
    default_classical_dt,
    evolve_classical,
    finite_difference_derivative,
    sample_matched_ensemble,
)
from dqnl.potentials import DoubleWellModel
from dqnl.units import HBAR, MASS, harmonic_frequency, oscillator_length

OMEGA = harmonic_frequency(35.0)
MODEL = DoubleWellModel(OMEGA, 0.0)


@pytest.fixture(scope="module")
def ensemble():
    return sample_matched_ensemble(MODEL, 4000, seed=7)


def test_wigner_moments(ensemble):
    l0 = oscillator_length(OMEGA)
    left = ensemble.x < 0
    assert left.sum() == 2000
    assert np.mean(ensemble.x[left]) == pytest.approx(-0.5, abs=4 * l0 / math.sqrt(2 * 2000))
    assert np.std(ensemble.x[~left]) == pytest.approx(l0 / math.sqrt(2), rel=0.05)
    assert np.std(ensemble.p) == pytest.approx(HBAR / (math.sqrt(2) * l0), rel=0.05)
    assert ensemble.weights.sum() == pytest.approx(1.0)


def test_microcanonical_shell():
    ens = sample_matched_ensemble(MODEL, 101, seed=3, kind="microcanonical")
    c = np.where(ens.x < 0, -0.5, 0.5)
    e = ens.p**2 / (2 * MASS) + 0.5 * MODEL.spring * (ens.x - c) ** 2
    assert np.allclose(e, 0.5 * HBAR * OMEGA, rtol=1e-12)
    assert len(ens) == 101


def test_sampling_is_seeded():
    a = sample_matched_ensemble(MODEL, 33, seed=5)
    b = sample_matched_ensemble(MODEL, 33, seed=5)
    c = sample_matched_ensemble(MODEL, 33, seed=6)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.p, b.p)
    assert not np.array_equal(a.x, c.x)


@pytest.mark.parametrize("kw", [dict(n=0), dict(n=2.5), dict(n=10, kind="thermal")])
def test_sampling_validation(kw):
    with pytest.raises(ValueError):
        sample_matched_ensemble(MODEL, seed=0, **kw)


def test_ensemble_validation():
    with pytest.raises(ValueError):
        ClassicalEnsemble(np.zeros(3), np.zeros(2), np.ones(3) / 3)
    with pytest.raises(ValueError):
        ClassicalEnsemble(np.zeros(2), np.zeros(2), np.array([1.5, -0.5]))
    with pytest.raises(ValueError):
        ClassicalEnsemble(np.zeros(2), np.zeros(2), np.ones(2))
    ens = ClassicalEnsemble(np.zeros(2), np.zeros(2), np.ones(2) / 2)
    with pytest.raises(ValueError):
        ens.x[0] = 1.0


def test_single_trajectory_matches_harmonic_solution():
    x0, p0 = -0.45, 0.8
    ens = ClassicalEnsemble(np.array([x0]), np.array([p0]), np.array([1.0]))
    dt = default_classical_dt(OMEGA)
    s = evolve_classical(ens, MODEL, 2.0, dt=dt, sample_dt=0.1)
    t = s.times
    p = p0 * np.cos(OMEGA * t) - MASS * OMEGA * (x0 + 0.5) * np.sin(OMEGA * t)
    assert np.max(np.abs(s.values - np.exp(1j * p * MODEL.L / HBAR))) < 1e-5


def test_bias_never_enters(ensemble):
    a = evolve_classical(ensemble, DoubleWellModel(OMEGA, 0.0), 1.0, sample_dt=0.05)
    b = evolve_classical(ensemble, DoubleWellModel(OMEGA, 0.3), 1.0, sample_dt=0.05)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.derivative_values, b.derivative_values)
    assert (a.Delta, b.Delta) == (0.0, 0.3)


def test_derivative_average_matches_finite_difference(ensemble):
    s = evolve_classical(ensemble, MODEL, 0.2, sample_dt=5 * default_classical_dt(OMEGA))
    fd = finite_difference_derivative(s)
    scale = np.max(np.abs(s.derivative_values))
    assert np.max(np.abs(fd - s.derivative_values[1:-1])) < 1e-3 * scale


def test_energy_drift_bounded_without_growth():
    ens = sample_matched_ensemble(MODEL, 64, seed=11)
    dt = default_classical_dt(OMEGA)
    short = evolve_classical(ens, MODEL, 1e4 * dt, dt=dt, sample_dt=100 * dt)
    long = evolve_classical(ens, MODEL, 1e5 * dt, dt=dt, sample_dt=100 * dt)
    assert long.energy_drift < 1e-6
    assert long.energy_drift < 1.5 * short.energy_drift


def test_step_must_resolve_trap_period(ensemble):
    with pytest.raises(ValueError, match="resolve"):
        evolve_classical(ensemble, MODEL, 1.0, dt=0.1)
    with pytest.raises(ValueError):
        evolve_classical(ensemble, MODEL, 1.0, dt=0.0)


def test_domain_guard():
    ens = ClassicalEnsemble(np.array([-0.5]), np.array([60.0]), np.array([1.0]))
    with pytest.raises(ClassicalDomainError, match="outside"):
        evolve_classical(ens, MODEL, 1.0, sample_dt=0.01)


def test_threads_do_not_change_result(ensemble):
    a = evolve_classical(ensemble, MODEL, 0.3, sample_dt=0.1, threads=1)
    b = evolve_classical(ensemble, MODEL, 0.3, sample_dt=0.1, threads=3)
    assert np.array_equal(a.values, b.values)


def test_thread_env(monkeypatch):
    from dqnl.parallel import thread_count

    monkeypatch.setenv("DQNL_THREADS", "4")
    assert thread_count() == 4
    monkeypatch.setenv("DQNL_THREADS", "zero")
    with pytest.raises(ValueError):
        thread_count()
    monkeypatch.setenv("DQNL_THREADS", "0")
    with pytest.raises(ValueError):
        thread_count()


def test_series_csv(ensemble, tmp_path):
    s = evolve_classical(ensemble, MODEL, 0.2, sample_dt=0.1)
    s.to_csv(tmp_path / "c.csv")
    rows = list(csv.reader(open(tmp_path / "c.csv")))
    assert rows[0] == ["time", "re_DC", "im_DC", "re_dDCdt", "im_dDCdt"]
    assert len(rows) == 4
