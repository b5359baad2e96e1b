"""Built-in invariant checks, run by ``dqnl validate`` and the ``validate`` experiment."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .classical import evolve_classical, sample_matched_ensemble
from .grid import ComplexField, SpatialGrid, forward_dft, gaussian, inverse_dft, translate
from .observables import displacement_expectation, write_csv
from .potentials import DoubleWellModel, delta_from_position
from .propagator import (
    PropagatorConfig,
    boundary_amplitude,
    double_well_grid,
    energy,
    evolve,
    ground_state,
    ideal_config,
    ideal_potential,
    ideal_superposition,
    step_real_time,
)
from .ramsey import run_ramsey
from .signal import SignalConfig, closed_form_signal
from .units import MASS, RB87, harmonic_frequency, oscillator_length


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: str
    passed: bool
    seconds: float = 0.0


def fourier_grid_hamiltonian(grid: SpatialGrid, v: np.ndarray) -> np.ndarray:
    """Dense H = F^dagger diag(p^2/2m) F + diag(V) on the grid (independent reference)."""
    n = grid.n_points
    f = sfft.fft(np.eye(n), axis=0, norm="ortho")
    return f.conj().T @ (grid.kinetic[:, None] * f) + np.diag(v)


def exact_propagate(grid: SpatialGrid, v: np.ndarray, psi: np.ndarray, t: float) -> np.ndarray:
    evals, evecs = np.linalg.eigh(fourier_grid_hamiltonian(grid, v))
    return evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ psi))


def dt_halving_ratio(dt: float = 2e-3, t_final: float = 1.0) -> float:
    """error(dt) / error(dt/2) of the split-step against exact grid propagation."""
    grid = SpatialGrid(128, -4.0, 4.0)
    omega = 2.0
    v = 0.5 * MASS * omega**2 * grid.x**2
    psi0 = gaussian(grid, 0.4, oscillator_length(omega))
    exact = exact_propagate(grid, v, psi0.values, t_final)
    errs = []
    for h in (dt, dt / 2):
        out = evolve(psi0, v, 0.0, t_final, PropagatorConfig(dt=h))
        errs.append(np.linalg.norm(out.values - exact) * math.sqrt(grid.dx))
    return errs[0] / errs[1]


def _timed(name, threshold, fn, test):
    t0 = time.perf_counter()
    value = float(fn())
    return CheckResult(name, value, threshold, bool(test(value)), time.perf_counter() - t0)


def run_checks(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    grid = SpatialGrid(256, -2.0, 2.0)

    def random_state():
        vals = rng.normal(size=grid.n_points) + 1j * rng.normal(size=grid.n_points)
        # smooth it so that it is band-limited
        vals = sfft.ifft(sfft.fft(vals) * np.exp(-(grid.p / 40.0) ** 2))
        return ComplexField(grid, vals).normalized()

    def dft_roundtrip():
        f = random_state()
        return np.max(np.abs(inverse_dft(forward_dft(f)).values - f.values))

    def translate_composition():
        f = random_state()
        a = float(rng.uniform(-1, 1))
        back = translate(translate(f, a), -a)
        return max(np.max(np.abs(back.values - f.values)), abs(translate(f, a).norm2() - 1.0))

    def norm_conservation():
        omega = harmonic_frequency(35.0)
        g = double_well_grid()
        v = 0.5 * MASS * omega**2 * g.x**2
        psi = gaussian(g, 0.1, oscillator_length(omega))
        cfg = PropagatorConfig.for_potential(float(np.max(v)))
        n0 = psi.norm2()
        for _ in range(1000):
            psi = step_real_time(psi, v, cfg)
        return abs(psi.norm2() - n0)

    def harmonic_ground_energy():
        omega = 2.0
        g = SpatialGrid(128, -4.0, 4.0)
        v = 0.5 * MASS * omega**2 * g.x**2
        cfg = PropagatorConfig(dt=1e-3, imag_dt=1e-3)
        gs = ground_state(v, cfg, gaussian(g, 0.3, 0.5))
        return abs(energy(gs, v) - 0.5 * omega)

    def ramsey_identity():
        worst = 0.0
        for _ in range(20):
            f = random_state()
            d = displacement_expectation(f, 1.0)
            worst = max(worst, abs(run_ramsey(f, 1.0, "real").difference - d.real),
                        abs(run_ramsey(f, 1.0, "imaginary").difference - d.imag))
        return worst

    def classical_bias_blindness():
        omega = harmonic_frequency(35.0)
        ens = sample_matched_ensemble(DoubleWellModel(omega), 200, seed)
        a = evolve_classical(ens, DoubleWellModel(omega, 0.0), 2.0, sample_dt=0.1)
        b = evolve_classical(ens, DoubleWellModel(omega, 0.3), 2.0, sample_dt=0.1)
        return np.max(np.abs(a.values - b.values))

    def ideal_boundary():
        model = DoubleWellModel(harmonic_frequency(35.0), 0.3)
        g = double_well_grid()
        v = ideal_potential(model, g)
        cfg = ideal_config(g, v)
        psi = evolve(ideal_superposition(g, model, cfg), v, 0.0, 10.0, cfg)
        return boundary_amplitude(psi)

    def envelope_bound():
        cfg = SignalConfig()
        s = closed_form_signal(cfg)
        return np.max(np.abs(s.signal) - 0.5 * np.exp(-cfg.gamma * s.times))

    def delta_linearity():
        x = np.linspace(-40.0, 40.0, 41)
        x = x[x != 0]
        ratio = delta_from_position(x, SignalConfig().omega_t) / x
        return np.ptp(ratio)

    def trap_frequency_hz():
        return RB87.angular_frequency_to_si(harmonic_frequency(35.0)) / (2 * math.pi) / 42e3 - 1

    def l0_nm():
        return RB87.length_to_si(oscillator_length(harmonic_frequency(35.0))) * 1e9 / 52.0 - 1

    def determinism():
        a = closed_form_signal(SignalConfig()).signal
        b = closed_form_signal(SignalConfig()).signal
        return 0.0 if np.array_equal(a, b) else 1.0

    return [
        _timed("dft_roundtrip", "< 1e-12", dft_roundtrip, lambda v: v < 1e-12),
        _timed("translate_composition", "< 1e-12", translate_composition, lambda v: v < 1e-12),
        _timed("norm_conservation_1000_steps", "< 1e-12", norm_conservation, lambda v: v < 1e-12),
        _timed("dt_halving_ratio", "in [3.5, 4.5]", dt_halving_ratio, lambda v: 3.5 <= v <= 4.5),
        _timed("harmonic_ground_energy", "< 1e-6", harmonic_ground_energy, lambda v: v < 1e-6),
        _timed("ramsey_identity", "< 1e-10", ramsey_identity, lambda v: v < 1e-10),
        _timed("classical_bias_blindness", "== 0", classical_bias_blindness, lambda v: v == 0.0),
        _timed("ideal_state_boundary", "< 1e-8", ideal_boundary, lambda v: v < 1e-8),
        _timed("signal_envelope_excess", "<= 1e-12", envelope_bound, lambda v: v <= 1e-12),
        _timed("delta_linearity_spread", "< 1e-15", delta_linearity, lambda v: v < 1e-15),
        _timed("trap_frequency_vs_42kHz", "|rel| < 0.02", trap_frequency_hz, lambda v: abs(v) < 0.02),
        _timed("l0_vs_52nm", "|rel| < 0.02", l0_nm, lambda v: abs(v) < 0.02),
        _timed("deterministic_rerun", "== 0", determinism, lambda v: v == 0.0),
    ]


def format_table(checks: list[CheckResult]) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  {'value':>12}  {'threshold':<14}  result"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {c.value:>12.4g}  {c.threshold:<14}  "
                     f"{'PASS' if c.passed else 'FAIL'}")
    n_fail = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - n_fail} passed, {n_fail} failed")
    return "\n".join(lines)


def write_report(checks: list[CheckResult], path):
    write_csv(path, ("check", "value", "passed"), ((c.name, c.value, int(c.passed)) for c in checks))
