"""Displacement-operator expectation values and related diagnostics."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .grid import ComplexField, translate
from .potentials import DoubleWellModel, PotentialSchedule
from .propagator import IDEAL_WINDOW, PropagatorConfig, check_boundary, evolve
from .units import HBAR, L


def displacement_expectation(psi: ComplexField, shift: float = L) -> complex:
    """<psi| exp(i p shift / hbar) |psi> = integral psi*(x) psi(x + shift) dx."""
    return psi.inner(translate(psi, shift))


def analytic_displacement(theta, Delta, t):
    """(1/2) exp(i (theta - Delta t / hbar)) for the biased two-well superposition."""
    return 0.5 * np.exp(1j * (theta - Delta * np.asarray(t) / HBAR))


def fidelity(a: ComplexField, b: ComplexField) -> float:
    """|<a|b>|^2, insensitive to global phase."""
    if a.grid != b.grid:
        raise ValueError("fidelity needs fields on the same grid")
    return abs(a.inner(b)) ** 2


def default_sample_dt(Delta: float, points_per_period: int = 64) -> float:
    if Delta == 0:
        raise ValueError("Delta = 0 has no oscillation period; give sample_dt explicitly")
    return 2.0 * math.pi * HBAR / abs(Delta) / points_per_period


@dataclass(frozen=True)
class DisplacementSeries:
    times: np.ndarray
    values: np.ndarray
    L: float = L
    theta: float = 0.0
    omega_d: float = 0.0
    states: list = field(default=None, repr=False, compare=False)

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.values)

    def rows(self):
        for t, d in zip(self.times, self.values):
            yield t, d.real, d.imag, abs(d)

    def to_csv(self, path):
        write_csv(path, ("time", "re_D", "im_D", "abs_D"), self.rows())


def write_csv(path, header, rows):
    """CSV with a header line and 17 significant digits per number."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_number(v) for v in row])


def format_number(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.17g}"


def track_displacement(psi0: ComplexField, schedule, shift: float, t_final: float,
                       sample_dt: float, config: PropagatorConfig, theta: float = 0.0,
                       Delta: float | None = None, keep_states: bool = False) -> DisplacementSeries:
    """Evolve ``psi0`` and record <D_shift>(t) every ``sample_dt`` up to ``t_final``.

    ``schedule`` may be a :class:`PotentialSchedule`, a static potential array,
    or a :class:`DoubleWellModel` (evaluated on the state's grid and held
    constant outside the same window as the ideal double-well state).
    Raises :class:`DomainTooSmallError` if the final state reaches the grid edge.
    """
    if isinstance(schedule, DoubleWellModel):
        Delta = schedule.Delta if Delta is None else Delta
        schedule = PotentialSchedule.static(psi0.grid, schedule, t_end=max(t_final, 1e-12),
                                            window=IDEAL_WINDOW)
    n = int(round(t_final / sample_dt))
    times = sample_dt * np.arange(n + 1)
    values = np.empty(n + 1, dtype=complex)
    states = [] if keep_states else None
    idx = {float(t): i for i, t in enumerate(times)}

    def observe(t, psi):
        values[idx[t]] = displacement_expectation(psi, shift)
        if states is not None:
            states.append(psi)

    final = evolve(psi0, schedule, 0.0, float(times[-1]), config, sample_times=times, observer=observe)
    check_boundary(final, config)
    omega_d = 0.0 if Delta is None else Delta / HBAR
    return DisplacementSeries(times, values, shift, theta, omega_d, states)


def zero_crossings(times: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Linearly interpolated times where ``y`` changes sign."""
    s = np.sign(y)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    t0, t1 = times[idx], times[idx + 1]
    y0, y1 = y[idx], y[idx + 1]
    return t0 - y0 * (t1 - t0) / (y1 - y0)


def frequency_from_zero_crossings(times, y) -> float:
    """Angular frequency of a sinusoid from a least-squares fit to its zero crossings."""
    tz = zero_crossings(np.asarray(times), np.asarray(y))
    if len(tz) < 2:
        raise ValueError("need at least two zero crossings")
    slope = np.polyfit(np.arange(len(tz)), tz, 1)[0]
    return math.pi / slope


def heisenberg_residual(series: DisplacementSeries, Delta: float) -> np.ndarray:
    """Relative mismatch between the central-difference d<D>/dt and -i (Delta/hbar) <D>."""
    t, d = series.times, series.values
    deriv = (d[2:] - d[:-2]) / (t[2:] - t[:-2])
    rhs = -1j * Delta / HBAR * d[1:-1]
    return np.abs(deriv - rhs) / np.abs(rhs)
