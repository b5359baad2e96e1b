"""Named experiments: each writes plot-ready CSV files plus ``metadata.json``."""
from __future__ import annotations

import json
import math
import os
import warnings

import numpy as np

from . import __version__, kernels
from .classical import evolve_classical, sample_matched_ensemble
from .config import RunConfig
from .grid import SpatialGrid
from .observables import default_sample_dt, displacement_expectation, track_displacement, write_csv
from .potentials import DoubleWellModel, LatticeParams, PotentialSchedule
from .propagator import (
    PropagatorConfig,
    check_boundary,
    double_well_grid,
    evolve,
    ideal_config,
    ideal_potential,
    ideal_superposition,
    preparation_grid,
    preparation_schedule,
    prepare_superposition,
    quench_bias,
    quench_schedule,
    recommended_ramp_time,
    resonance_free_dt,
    v1_for_bias,
    PREP_V1_START,
    PREP_WINDOW,
)
from .ramsey import run_ramsey
from .signal import SignalConfig, ensemble_signal, fwhm, shot_noise_overlay, single_line_width, spectrum
from .units import L, harmonic_frequency, oscillator_length


class ExperimentError(RuntimeError):
    pass


def derived_quantities(cfg: RunConfig) -> dict:
    """Physical scales implied by the configuration (natural units unless suffixed)."""
    units = cfg.units
    omega = harmonic_frequency(cfg.V2)
    l0 = oscillator_length(omega)
    t_delta = cfg.t_delta if cfg.t_delta is not None else 8.0 / omega
    upper = math.inf if cfg.Delta == 0 else 1.0 / abs(cfg.Delta)
    return {
        "omega": omega,
        "omega_hz": units.angular_frequency_to_si(omega) / (2.0 * math.pi),
        "l0": l0,
        "l0_nm": units.length_to_si(l0) * 1e9,
        "L_over_l0": L / l0,
        "overlap_bound": math.exp(-L / l0),
        "recoil_energy_j": units.recoil_energy_j,
        "t0_s": units.time_s,
        "omega_t": cfg.omega_t,
        "delta_per_L": (math.pi**2 / 2.0) * cfg.omega_t**2 * L,
        "t_delta": t_delta,
        "t_delta_us": units.time_to_si(t_delta) * 1e6,
        "timing_window": [1.0 / omega, upper if math.isfinite(upper) else None],
        "t_delta_times_omega": t_delta * omega,
        "t_delta_times_Delta": t_delta * abs(cfg.Delta),
        "timing_window_satisfied": bool(1.0 / omega < t_delta < upper),
        "oscillation_period": None if cfg.Delta == 0 else 2.0 * math.pi / abs(cfg.Delta),
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_metadata(out_dir, cfg: RunConfig, resolved: dict, results: dict, files: list):
    meta = {
        "version": __version__,
        "backend": kernels.BACKEND,
        "seed": cfg.seed,
        "config": cfg.as_dict(),
        "resolved": resolved,
        "derived": derived_quantities(cfg),
        "results": results,
        "files": sorted(files),
    }
    with open(os.path.join(out_dir, "metadata.json"), "w") as fh:
        json.dump(_jsonable(meta), fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- shared pieces -----------------------------------------------------------------

def _ideal_setup(cfg: RunConfig, Delta: float):
    if cfg.x_min is not None:
        grid = SpatialGrid(cfg.n_points or 192, cfg.x_min, cfg.x_max)
    else:
        grid = double_well_grid(cfg.n_points or 192)
    model = DoubleWellModel(harmonic_frequency(cfg.V2), Delta)
    v = ideal_potential(model, grid)
    config = PropagatorConfig(dt=cfg.dt) if cfg.dt else ideal_config(grid, v)
    return grid, model, v, config


def _default_t_final(cfg: RunConfig, periods: float) -> float:
    if cfg.t_final is not None:
        return cfg.t_final
    return periods * 2.0 * math.pi / abs(cfg.Delta) if cfg.Delta else 20.0


def _default_sample_dt(cfg: RunConfig, t_final: float) -> float:
    if cfg.sample_dt is not None:
        return cfg.sample_dt
    return default_sample_dt(cfg.Delta) if cfg.Delta else t_final / 256.0


def schedule_config(schedule: PotentialSchedule, dt: float | None = None) -> PropagatorConfig:
    """Time step obeying both the phase guard and the step-resonance bound."""
    if dt is not None:
        return PropagatorConfig(dt=dt)
    vmax = schedule.max_abs()
    dt = min(0.9 * 0.5 / vmax, 0.75 * resonance_free_dt(schedule.grid, 2.0 * vmax))
    return PropagatorConfig(dt=dt)


# --- experiments -------------------------------------------------------------------

def run_prepare(cfg: RunConfig, out_dir: str):
    grid = preparation_grid(cfg.n_points or 256) if cfg.x_min is None else SpatialGrid(
        cfg.n_points or 256, cfg.x_min, cfg.x_max)
    end = LatticeParams(cfg.V1, cfg.V2, 0.0)
    ramp_time = cfg.ramp_time or recommended_ramp_time(end=end)
    schedule = preparation_schedule(grid, ramp_time, V1_end=cfg.V1, V2=cfg.V2, shape=cfg.ramp_shape)
    config = schedule_config(schedule, cfg.dt)
    psi, report = prepare_superposition(schedule, config)

    V1_bias = v1_for_bias(cfg.Delta, cfg.V2, grid, config, window=PREP_WINDOW, phi=cfg.phi)
    after = LatticeParams(V1_bias, cfg.V2, cfg.phi)
    t_delta = derived_quantities(cfg)["t_delta"]
    if t_delta > 0:
        q_sched = quench_schedule(grid, end, after, t_delta, window=PREP_WINDOW)
        q_config = schedule_config(q_sched, cfg.dt)
    else:
        q_sched = PotentialSchedule.static(grid, after, window=PREP_WINDOW)
        q_config = config
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        psi_q, excitation = quench_bias(psi, q_sched, t_delta, q_config)
    files = ["prepared_state.csv"]
    write_csv(os.path.join(out_dir, "prepared_state.csv"),
              ("x", "re_psi", "im_psi", "prob", "re_psi_quenched", "im_psi_quenched"),
              zip(grid.x, psi.values.real, psi.values.imag, psi.probability,
                  psi_q.values.real, psi_q.values.imag))
    resolved = {"n_points": grid.n_points, "x_min": grid.x_min, "x_max": grid.x_max,
                "ramp_time": ramp_time, "V1_start": PREP_V1_START, "dt": config.dt,
                "quench_dt": q_config.dt, "V1_after_quench": V1_bias, "t_delta": t_delta}
    results = dict(report.as_dict(), quench_excitation_fraction=excitation,
                   warnings=[str(w.message) for w in caught])
    return resolved, results, files


def run_track_displacement(cfg: RunConfig, out_dir: str):
    grid, model, v, config = _ideal_setup(cfg, cfg.Delta)
    t_final = _default_t_final(cfg, 3.0)
    sample_dt = _default_sample_dt(cfg, t_final)
    psi0 = ideal_superposition(grid, model, config, cfg.theta)
    series = track_displacement(psi0, v, L, t_final, sample_dt, config, theta=cfg.theta,
                                Delta=cfg.Delta)
    series.to_csv(os.path.join(out_dir, "displacement.csv"))
    resolved = {"n_points": grid.n_points, "x_min": grid.x_min, "x_max": grid.x_max,
                "dt": config.dt, "t_final": t_final, "sample_dt": sample_dt}
    modulus = np.abs(series.values)
    results = {"modulus_min": modulus.min(), "modulus_max": modulus.max(),
               "omega_d": series.omega_d}
    return resolved, results, ["displacement.csv"]


def run_ramsey_scan(cfg: RunConfig, out_dir: str):
    grid, model, v, config = _ideal_setup(cfg, cfg.Delta)
    t_final = _default_t_final(cfg, 1.0)
    sample_dt = _default_sample_dt(cfg, t_final)
    psi0 = ideal_superposition(grid, model, config, cfg.theta)
    times = sample_dt * np.arange(int(round(t_final / sample_dt)) + 1)
    rows = []

    def observe(t, psi):
        d = displacement_expectation(psi, L)
        re = run_ramsey(psi, L, "real").difference
        im = run_ramsey(psi, L, "imaginary").difference
        rows.append((t, re, im, d.real, d.imag))

    final = evolve(psi0, v, 0.0, float(times[-1]), config, sample_times=times, observer=observe)
    check_boundary(final, config)
    write_csv(os.path.join(out_dir, "ramsey_scan.csv"),
              ("time", "protocol_re", "protocol_im", "direct_re", "direct_im"), rows)
    arr = np.array(rows)
    mismatch = float(np.max(np.abs(arr[:, 1:3] - arr[:, 3:5])))
    resolved = {"n_points": grid.n_points, "x_min": grid.x_min, "x_max": grid.x_max,
                "dt": config.dt, "t_final": t_final, "sample_dt": sample_dt}
    return resolved, {"max_protocol_mismatch": mismatch}, ["ramsey_scan.csv"]


def run_classical_compare(cfg: RunConfig, out_dir: str):
    t_final = _default_t_final(cfg, 1.0)
    sample_dt = _default_sample_dt(cfg, t_final)
    omega = harmonic_frequency(cfg.V2)
    ens = sample_matched_ensemble(DoubleWellModel(omega), cfg.n_trajectories, cfg.seed,
                                  kind=cfg.classical_ensemble)
    files, results, resolved = [], {}, {"t_final": t_final, "sample_dt": sample_dt}
    classical = {}
    for Delta in sorted({0.0, cfg.Delta}):
        tag = f"{Delta:g}"
        grid, model, v, config = _ideal_setup(cfg, Delta)
        psi0 = ideal_superposition(grid, model, config, cfg.theta)
        q = track_displacement(psi0, v, L, t_final, sample_dt, config, theta=cfg.theta, Delta=Delta)
        name = f"quantum_delta_{tag}.csv"
        q.to_csv(os.path.join(out_dir, name))
        files.append(name)
        c = evolve_classical(ens, model, t_final, cfg.classical_dt, sample_dt)
        name = f"classical_delta_{tag}.csv"
        c.to_csv(os.path.join(out_dir, name))
        files.append(name)
        classical[Delta] = c
        resolved[f"quantum_dt_delta_{tag}"] = config.dt
        results[f"classical_energy_drift_delta_{tag}"] = c.energy_drift
        z = np.abs(c.derivative_values.real) / np.maximum(c.derivative_stderr.real, 1e-300)
        results[f"classical_max_force_z_delta_{tag}"] = float(z.max())
    series = list(classical.values())
    results["classical_bias_blind"] = bool(all(np.array_equal(series[0].values, s.values)
                                               for s in series))
    resolved["n_points"] = grid.n_points
    resolved["classical_dt"] = cfg.classical_dt or (1e-3 / omega)
    return resolved, results, files


def signal_config_from(cfg: RunConfig) -> SignalConfig:
    return SignalConfig(n_wells=cfg.n_wells, omega_t=cfg.omega_t, Delta=cfg.Delta, gamma=cfg.gamma,
                        t_final=cfg.t_final or 100.0, sample_dt=cfg.sample_dt, mode=cfg.signal_mode,
                        layout=cfg.well_layout, well_spacing=cfg.well_spacing,
                        layout_seed=cfg.seed, V2=cfg.V2)


def run_ensemble_signal(cfg: RunConfig, out_dir: str):
    scfg = signal_config_from(cfg)
    grid = None
    if cfg.n_points is not None or cfg.x_min is not None:
        grid = (SpatialGrid(cfg.n_points or 192, cfg.x_min, cfg.x_max) if cfg.x_min is not None
                else double_well_grid(cfg.n_points))
    kw = {"grid": grid} if scfg.mode == "full_quantum" else {}
    config = PropagatorConfig(dt=cfg.dt) if cfg.dt and scfg.mode == "full_quantum" else None
    sig = ensemble_signal(scfg, config, **kw)
    if cfg.atoms_per_point > 0:
        sig = shot_noise_overlay(sig, cfg.atoms_per_point, cfg.seed)
    sig = spectrum(sig, window=cfg.hann_window)
    sig.to_csv(os.path.join(out_dir, "signal.csv"), os.path.join(out_dir, "spectrum.csv"))
    fine = spectrum(sig, window=cfg.hann_window, pad_factor=8)
    try:
        width = fwhm(fine.spectrum_freqs, fine.spectrum_mag)
    except ValueError:
        width = None
    resolved = {"sample_dt": sig.sample_dt, "t_final": scfg.t_final, "bin_width": sig.bin_width,
                "well_positions": scfg.positions().tolist(), "biases": scfg.biases().tolist()}
    results = {"peak_freq": sig.peak_freq, "fwhm": width,
               "single_line_fwhm": single_line_width(scfg),
               "peak_offset_bins": (sig.peak_freq - cfg.Delta) / sig.bin_width}
    return resolved, results, ["signal.csv", "spectrum.csv"]


def run_validate(cfg: RunConfig, out_dir: str):
    from .validation import run_checks, write_report

    checks = run_checks(seed=cfg.seed)
    write_report(checks, os.path.join(out_dir, "validation.csv"))
    results = {"passed": sum(c.passed for c in checks), "failed": sum(not c.passed for c in checks)}
    return {}, results, ["validation.csv"]


EXPERIMENT_RUNNERS = {
    "prepare": run_prepare,
    "track_displacement": run_track_displacement,
    "ramsey_scan": run_ramsey_scan,
    "classical_compare": run_classical_compare,
    "ensemble_signal": run_ensemble_signal,
    "validate": run_validate,
}


def run_experiment(cfg: RunConfig, out_dir: str) -> dict:
    """Run ``cfg.experiment``, write its files into ``out_dir`` and return the results."""
    os.makedirs(out_dir, exist_ok=True)
    runner = EXPERIMENT_RUNNERS[cfg.experiment]
    try:
        resolved, results, files = runner(cfg, out_dir)
    except Exception as exc:
        raise ExperimentError(f"experiment {cfg.experiment!r} failed: {exc}") from exc
    write_metadata(out_dir, cfg, resolved, results, files)
    return results
