"""Split-step Fourier propagation in real and imaginary time.

Real-time steps use Strang splitting exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2)
with the potential of a time-dependent schedule taken at the step midpoint.
Ground states come from normalized imaginary-time evolution with the same
splitting; a half-domain mask turns it into a single-well solver.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.fft as sfft
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .grid import ComplexField, SpatialGrid, gaussian
from .potentials import (
    DoubleWellModel,
    LatticeParams,
    PotentialSchedule,
    Segment,
    potential_values,
    timing_window,
)
from .units import HBAR, L, MASS


class PropagationError(RuntimeError):
    pass


class PhaseWrapError(ValueError):
    """dt * max|V| / hbar exceeds the configured limit."""


class ConvergenceError(PropagationError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class DomainTooSmallError(PropagationError):
    pass


@dataclass(frozen=True)
class PropagatorConfig:
    dt: float = 1e-3
    order: int = 2
    norm_tolerance: float = 1e-10
    boundary_amplitude_limit: float = 1e-8
    max_phase: float = 0.5
    imag_dt: float | None = None
    energy_tolerance: float = 1e-12
    max_iterations: int = 500_000

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.order != 2:
            raise ValueError("only second-order (Strang) splitting is implemented")
        if self.imag_dt is not None and not self.imag_dt > 0:
            raise ValueError("imag_dt must be positive")

    @classmethod
    def for_potential(cls, vmax: float, safety: float = 0.9, **kw) -> "PropagatorConfig":
        """Largest dt that respects the phase-wrap guard with a safety margin."""
        max_phase = kw.get("max_phase", 0.5)
        dt = safety * max_phase * HBAR / max(vmax, 1e-300)
        return cls(dt=min(dt, kw.pop("dt_cap", 1e-2)), **kw)


def resonance_free_dt(grid: SpatialGrid, v_range: float) -> float:
    """Upper bound on dt for time-dependent potentials.

    A potential that changes every step drives the discrete propagator at
    2 pi / dt; if that exceeds the grid's energy span (max kinetic plus the
    potential range) no pair of grid states can be resonant with it and the
    bound state cannot leak into the fast high-momentum states.
    """
    return 2.0 * math.pi * HBAR / (float(grid.kinetic.max()) + v_range)


def check_phase_guard(dt: float, vmax: float, config: PropagatorConfig):
    if dt * vmax / HBAR >= config.max_phase:
        raise PhaseWrapError(
            f"dt*max|V|/hbar = {dt * vmax / HBAR:.3g} violates the phase-wrap guard "
            f"(< {config.max_phase}); reduce dt below {config.max_phase * HBAR / vmax:.3g}"
        )


def _potential_array(V) -> np.ndarray:
    v = V.values if isinstance(V, ComplexField) else np.asarray(V)
    if np.iscomplexobj(v):
        if np.any(v.imag != 0):
            raise ValueError("potential must be real")
        v = v.real
    return np.asarray(v, dtype=float)


def step_real_time(psi: ComplexField, V, config: PropagatorConfig, dt: float | None = None) -> ComplexField:
    """One Strang step exp(-i H dt / hbar) psi for a static potential."""
    dt = config.dt if dt is None else dt
    v = _potential_array(V)
    check_phase_guard(dt, float(np.max(np.abs(v))), config)
    half = np.exp(-0.5j * v * dt / HBAR)
    kin = np.exp(-1j * psi.grid.kinetic * dt / HBAR)
    out = sfft.ifft(sfft.fft(psi.values * half, norm="ortho") * kin, norm="ortho") * half
    return ComplexField(psi.grid, out)


def _evolve_static(values, grid, v, h, n, config):
    half = np.exp(-0.5j * v * h / HBAR)
    full = half * half
    kin = np.exp(-1j * grid.kinetic * h / HBAR)
    psi = values * half
    for i in range(n):
        psi = sfft.fft(psi, norm="ortho", overwrite_x=True)
        psi *= kin
        psi = sfft.ifft(psi, norm="ortho", overwrite_x=True)
        psi *= full if i < n - 1 else half
    return psi


def _evolve_schedule(values, grid, schedule, t0, h, n):
    kin = np.exp(-1j * grid.kinetic * h / HBAR)
    psi = np.array(values, dtype=complex)
    for i in range(n):
        half = np.exp(-0.5j * schedule.values_at(t0 + (i + 0.5) * h) * h / HBAR)
        psi *= half
        psi = sfft.fft(psi, norm="ortho", overwrite_x=True)
        psi *= kin
        psi = sfft.ifft(psi, norm="ortho", overwrite_x=True)
        psi *= half
    return psi


def _n_steps(span: float, dt: float) -> int:
    return max(1, math.ceil(span / dt - 1e-9))


def evolve(
    psi: ComplexField,
    potential,
    t0: float,
    t1: float,
    config: PropagatorConfig,
    sample_times: Iterable[float] | None = None,
    observer: Callable[[float, ComplexField], None] | None = None,
) -> ComplexField:
    """Propagate ``psi`` from t0 to t1.

    ``potential`` is a static array/field or a :class:`PotentialSchedule`.
    Steps are shortened so that every sample time is hit exactly; ``observer``
    is called with (t, psi) at t0 (if sampled) and each sample time.
    """
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    grid = psi.grid
    schedule = potential if isinstance(potential, PotentialSchedule) else None
    if schedule is not None and schedule.is_static:
        v_static = schedule.values_at(t0)
    elif schedule is None:
        v_static = _potential_array(potential)
    else:
        v_static = None
    vmax = float(np.max(np.abs(v_static))) if v_static is not None else schedule.max_abs()
    check_phase_guard(config.dt, vmax, config)
    if v_static is None and config.dt >= resonance_free_dt(grid, 2.0 * vmax):
        warnings.warn(
            f"dt = {config.dt:.3g} allows step-frequency resonances on this grid for a "
            f"time-dependent potential; use dt < {resonance_free_dt(grid, 2.0 * vmax):.3g}",
            RuntimeWarning,
            stacklevel=2,
        )

    samples = sorted({float(t) for t in sample_times if t0 <= t <= t1}) if sample_times is not None else []
    stops = samples if samples and samples[-1] == t1 else samples + [t1]
    sampled = set(samples)
    values = np.array(psi.values, dtype=complex)
    t = t0
    for stop in stops:
        span = stop - t
        if span > 0:
            n = _n_steps(span, config.dt)
            h = span / n
            if v_static is not None:
                values = _evolve_static(values, grid, v_static, h, n, config)
            else:
                values = _evolve_schedule(values, grid, schedule, t, h, n)
        t = stop
        if observer is not None and stop in sampled:
            observer(t, ComplexField(grid, values))
    return ComplexField(grid, values)


# --- energies and imaginary time -------------------------------------------------

def kinetic_energy(psi: ComplexField) -> float:
    pk = sfft.fft(psi.values, norm="ortho")
    return float(np.sum(np.abs(pk) ** 2 * psi.grid.kinetic) * psi.grid.dx)


def potential_energy(psi: ComplexField, V) -> float:
    return float(np.sum(np.abs(psi.values) ** 2 * _potential_array(V)) * psi.grid.dx)


def energy(psi: ComplexField, V) -> float:
    """<psi|H|psi> for a normalized state."""
    return kinetic_energy(psi) + potential_energy(psi, V)


def ground_state(
    V,
    config: PropagatorConfig,
    initial_guess: ComplexField,
    mask: np.ndarray | None = None,
    check_every: int = 10,
    orthogonal_to: Sequence[ComplexField] = (),
) -> ComplexField:
    """Lowest eigenstate of p^2/2m + V by normalized imaginary-time evolution.

    Iterates until the energy changes by less than ``config.energy_tolerance``
    per step.  ``mask`` (boolean array) confines the state to part of the
    domain, which yields the ground state of a single well.  States in
    ``orthogonal_to`` are projected out after every step, which turns the
    iteration into a solver for the next excited state.
    """
    grid = initial_guess.grid
    v = _potential_array(V)
    tau = config.imag_dt if config.imag_dt is not None else config.dt
    v_shift = v - v.min()
    half = np.exp(-0.5 * v_shift * tau / HBAR)
    kin = np.exp(-grid.kinetic * tau / HBAR)
    psi = np.array(initial_guess.values, dtype=complex)
    lower = [np.asarray(f.values, dtype=complex) for f in orthogonal_to]

    def project_out(a):
        for b in lower:
            a -= b * (np.vdot(b, a) / np.vdot(b, b))
        return a

    psi = project_out(psi)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        half = np.where(mask, half, 0.0)
        psi = np.where(mask, psi, 0.0)
    nrm = math.sqrt(np.vdot(psi, psi).real * grid.dx)
    if nrm == 0:
        raise ValueError("initial guess has no weight in the allowed region")
    psi /= nrm

    e_old = energy(ComplexField(grid, psi), v)
    residual = math.inf
    for it in range(1, config.max_iterations + 1):
        psi *= half
        psi = sfft.fft(psi, norm="ortho", overwrite_x=True)
        psi *= kin
        psi = sfft.ifft(psi, norm="ortho", overwrite_x=True)
        psi *= half
        if lower:
            psi = project_out(psi)
        psi /= math.sqrt(np.vdot(psi, psi).real * grid.dx)
        if it % check_every == 0:
            e_new = energy(ComplexField(grid, psi), v)
            residual = abs(e_new - e_old) / check_every
            e_old = e_new
            if residual < config.energy_tolerance and it >= 5 * check_every:
                return ComplexField(grid, psi)
    raise ConvergenceError("imaginary-time evolution did not converge", residual)


def stationary_filter(psi: ComplexField, V, config: PropagatorConfig, sigma: float = 0.5) -> ComplexField:
    """Project ``psi`` onto the real-time propagator's eigenstates near its energy.

    Accumulates exp(i E t) U(t) psi under a Gaussian time window of width
    ``sigma`` (total span 8 sigma).  Components whose energy differs by dE are
    suppressed by exp(-(dE sigma)^2 / 2); this removes the O(dt^2) mismatch
    between an imaginary-time ground state and the state that is actually
    stationary under the Strang step, which would otherwise radiate into
    unbound states.
    """
    grid = psi.grid
    v = _potential_array(V)
    check_phase_guard(config.dt, float(np.max(np.abs(v))), config)
    e0 = energy(psi, v)
    span = 8.0 * sigma
    n = _n_steps(span, config.dt)
    h = span / n
    half = np.exp(-0.5j * v * h / HBAR)
    full = half * half
    kin = np.exp(-1j * grid.kinetic * h / HBAR)
    t = np.arange(n + 1) * h
    w = np.exp(-0.5 * ((t - 0.5 * span) / sigma) ** 2) * np.exp(1j * e0 * t / HBAR)
    acc = w[0] * psi.values
    phi = psi.values * half
    for i in range(1, n + 1):
        phi = sfft.ifft(sfft.fft(phi, norm="ortho", overwrite_x=True) * kin, norm="ortho",
                        overwrite_x=True)
        acc = acc + w[i] * (phi * half)
        phi *= full
    out = ComplexField(grid, acc).normalized()
    # fix the global phase so a real ground state stays (nearly) real and positive
    ph = np.vdot(out.values, psi.values)
    return out.with_values(out.values * (ph / abs(ph)))


def half_masks(grid: SpatialGrid, split: float):
    """Boolean masks for x < split and x > split; a grid point sitting exactly
    on ``split`` belongs to neither, so the two halves are mirror images on a
    symmetric grid."""
    eps = 1e-9 * grid.dx
    return grid.x < split - eps, grid.x > split + eps


def half_weights(psi: ComplexField, split: float) -> tuple[float, float]:
    """Probabilities left and right of ``split`` (a point on the split counts half to each)."""
    left, right = half_masks(psi.grid, split)
    prob = psi.probability * psi.grid.dx
    mid = 0.5 * float(prob[~(left | right)].sum())
    return float(prob[left].sum()) + mid, float(prob[right].sum()) + mid


def well_ground_states(V, config: PropagatorConfig, grid: SpatialGrid, split: float,
                       width: float = 0.15, centers=None):
    """Ground states (left, right) of the potential restricted to x < split / x >= split.

    The two states have disjoint support, so they are exactly orthogonal.
    """
    v = _potential_array(V)
    left, right = half_masks(grid, split)
    if centers is None:
        centers = (float(grid.x[left][np.argmin(v[left])]), float(grid.x[right][np.argmin(v[right])]))
    out = []
    for mask, c in zip((left, right), centers):
        guess = gaussian(grid, c, width)
        out.append(ground_state(v, config, guess, mask=mask))
    return tuple(out)


def realized_bias(V, config: PropagatorConfig, grid: SpatialGrid, split: float) -> float:
    """E_right - E_left of the two single-well ground states."""
    v = _potential_array(V)
    phi_l, phi_r = well_ground_states(v, config, grid, split)
    return energy(phi_r, v) - energy(phi_l, v)


def v1_for_bias(Delta: float, V2: float, grid: SpatialGrid, config: PropagatorConfig,
                window=(0.0, 2.0), split: float = 1.0, phi: float = math.pi / 4) -> float:
    """Short-lattice depth V1 (at the given phi) whose wells differ by Delta."""
    if Delta == 0:
        return 0.0

    def f(v1):
        v = potential_values(LatticeParams(v1, V2, phi), grid, window)
        return realized_bias(v, config, grid, split) - Delta

    hi = 2.0 * abs(Delta) + 0.1
    while f(hi) * (1 if Delta > 0 else -1) < 0:
        hi *= 2.0
    return brentq(f, 0.0, hi, xtol=1e-10)


def superposition_state(phi_state: ComplexField, separation: float = L, theta: float = 0.0) -> ComplexField:
    """[Phi(x + L/2) + Phi(x - L/2) e^{i theta}] / sqrt(2), renormalized on the grid."""
    from .grid import translate

    left = translate(phi_state, 0.5 * separation)
    right = translate(phi_state, -0.5 * separation)
    return ComplexField(phi_state.grid, (left.values + np.exp(1j * theta) * right.values)
                        / math.sqrt(2.0)).normalized()


def harmonic_ground_state(grid: SpatialGrid, omega: float, config: PropagatorConfig,
                          center: float = 0.0) -> ComplexField:
    """Numerical ground state of m omega^2 (x - center)^2 / 2 on the grid."""
    v = 0.5 * MASS * omega**2 * (grid.x - center) ** 2
    guess = gaussian(grid, center, 1.2 / math.sqrt(MASS * omega))
    return ground_state(v, config, guess)


IDEAL_WINDOW = (-1.4, 1.4)


def double_well_grid(n_points: int = 192, half_width: float = 2.0) -> SpatialGrid:
    """Grid for the idealized double well.

    A period of 4 L keeps psi(x + L) free of wrap-around overlap; 192 points
    resolve the packets spectrally while keeping the kinetic spectrum below
    the step-frequency resonance at the phase-guard time step.  Finer grids
    need a shorter step (see :func:`ideal_config`); widening the period
    instead keeps the step long.
    """
    return SpatialGrid(n_points, -half_width, half_width)


def ideal_potential(model: DoubleWellModel, grid: SpatialGrid, window=IDEAL_WINDOW) -> np.ndarray:
    """Piecewise double well, held constant beyond ``window`` (no packet reaches there)."""
    return potential_values(model, grid, window)


def ideal_config(grid: SpatialGrid, v: np.ndarray, safety: float = 0.9, **kw) -> PropagatorConfig:
    """Propagator settings for a static potential on ``grid``.

    dt obeys the phase guard and also stays below the step-frequency
    resonance bound.  Without the second condition a fine grid lets the
    kinks of the piecewise potential pump the bound state into aliased
    high-momentum states that run to the domain edge.
    """
    v = _potential_array(v)
    cfg = PropagatorConfig.for_potential(float(np.max(np.abs(v))), safety, **kw)
    dt = min(cfg.dt, safety * resonance_free_dt(grid, float(np.ptp(v))))
    return replace(cfg, dt=dt)


def ideal_superposition(grid: SpatialGrid, model: DoubleWellModel, config: PropagatorConfig,
                        theta: float = 0.0, window=IDEAL_WINDOW) -> ComplexField:
    """[Phi_left + e^{i theta} Phi_right] / sqrt2 for the (biased) piecewise double well.

    Phi_left and Phi_right span the same space as the two lowest eigenstates
    of ``model``, rotated so that each sits in one well.  They are filtered to
    be stationary under the real-time step, so the only dynamics left is the
    relative phase Delta t / hbar.  This is the state reached once the bias
    has been switched on inside the adiabatic timing window.
    """
    v = ideal_potential(model, grid, window)
    l0 = math.sqrt(HBAR / (MASS * model.omega))
    guess = superposition_state(gaussian(grid, 0.0, l0), model.L)
    e0 = stationary_filter(ground_state(v, config, guess), v, config)
    guess = superposition_state(gaussian(grid, 0.0, l0), model.L, math.pi)
    e1 = stationary_filter(ground_state(v, config, guess, orthogonal_to=(e0,)), v, config)
    # diagonalize the left-half projector inside span{e0, e1}
    left = (grid.x < 0).astype(float)
    basis = np.array([e0.values, e1.values])
    proj = (basis.conj() * left) @ basis.T * grid.dx
    _, vecs = np.linalg.eigh(proj)
    phi_r, phi_l = (vecs[:, k] @ basis for k in (0, 1))
    phi_l, phi_r = (f * np.exp(-1j * np.angle(np.sum(f))) for f in (phi_l, phi_r))
    out = (phi_l + np.exp(1j * theta) * phi_r) / math.sqrt(2.0)
    return ComplexField(grid, out).normalized()


def boundary_amplitude(psi: ComplexField, n_edge: int = 2) -> float:
    v = np.abs(psi.values)
    return float(max(v[:n_edge].max(), v[-n_edge:].max()))


def check_boundary(psi: ComplexField, config: PropagatorConfig):
    amp = boundary_amplitude(psi)
    if amp >= config.boundary_amplitude_limit:
        raise DomainTooSmallError(
            f"wavefunction amplitude {amp:.2e} at the domain edge exceeds "
            f"{config.boundary_amplitude_limit:.1e}; enlarge the grid"
        )


# --- preparation --------------------------------------------------------------------

@dataclass(frozen=True)
class PreparationReport:
    fidelity_to_target: float
    left_weight: float
    right_weight: float
    excitation_fraction: float
    l0: float
    overlap_bound: float
    boundary_amplitude: float

    @property
    def overlap_l0(self):
        return self.l0, self.overlap_bound

    def as_dict(self):
        return {
            "fidelity_to_target": self.fidelity_to_target,
            "left_weight": self.left_weight,
            "right_weight": self.right_weight,
            "excitation_fraction": self.excitation_fraction,
            "l0": self.l0,
            "overlap_bound": self.overlap_bound,
            "boundary_amplitude": self.boundary_amplitude,
        }


def packet_size(psi: ComplexField) -> float:
    """l0 = sqrt(2) * position standard deviation (exact for an oscillator ground state)."""
    p = psi.probability * psi.grid.dx
    p = p / p.sum()
    mean = np.sum(p * psi.grid.x)
    return float(math.sqrt(2.0 * np.sum(p * (psi.grid.x - mean) ** 2)))


PREP_V1_START = 30.0
PREP_V1_END = 5.0
PREP_V2 = 35.0
PREP_WINDOW = (0.0, 2.0)


def preparation_grid(n_points: int = 256) -> SpatialGrid:
    """Three lattice periods of room around the isolated double-well cell [0, 2]."""
    return SpatialGrid(n_points, -2.0, 4.0)


def preparation_schedule(grid: SpatialGrid, ramp_time: float, V1_start: float = PREP_V1_START,
                         V1_end: float = PREP_V1_END, V2: float = PREP_V2,
                         shape: str = "smoothstep", hold: float = 0.0,
                         window=(0.0, 2.0)) -> PotentialSchedule:
    """Ramp from the single long-period well (V2 = 0, phi = 0) to V2 >> V1.

    V1 is lowered from ``V1_start`` to ``V1_end`` while V2 rises from 0, which
    keeps the site deep throughout so the split state stays bound.
    """
    start = LatticeParams(V1_start, 0.0, 0.0)
    end = LatticeParams(V1_end, V2, 0.0)
    segs = [Segment(0.0, ramp_time, end, shape=shape, start=start)]
    if hold > 0:
        segs.append(Segment(ramp_time, ramp_time + hold, end))
    return PotentialSchedule(grid, segs, window=window)


def _split_point(schedule: PotentialSchedule, split):
    if split is not None:
        return float(split)
    if schedule.window is not None:
        return 0.5 * (schedule.window[0] + schedule.window[1])
    return 0.0


def prepare_superposition(schedule: PotentialSchedule, config: PropagatorConfig,
                          split: float | None = None):
    """Adiabatically split a single-well ground state into two wells.

    Returns the final motional state and a :class:`PreparationReport`
    comparing it with the equal-weight, zero-phase two-well superposition
    built from the final single-well ground states.
    """
    p0, _ = schedule.parameters_at(schedule.t_start)
    if isinstance(p0, LatticeParams) and (p0.V2 != 0 or p0.phi != 0):
        raise ValueError("preparation must start from the single lattice (V2 = 0, phi = 0)")
    grid = schedule.grid
    split = _split_point(schedule, split)
    v0 = schedule.values_at(schedule.t_start)
    guess = gaussian(grid, split, 0.25)
    psi0 = stationary_filter(ground_state(v0, config, guess), v0, config)

    psi = evolve(psi0, schedule, schedule.t_start, schedule.t_end, config)
    check_boundary(psi, config)

    v1 = schedule.values_at(schedule.t_end)
    phi_l, phi_r = well_ground_states(v1, config, grid, split)
    target = ComplexField(grid, (phi_l.values + phi_r.values) / math.sqrt(2.0))
    left_weight, right_weight = half_weights(psi, split)
    proj = abs(phi_l.inner(psi)) ** 2 + abs(phi_r.inner(psi)) ** 2
    l0 = 0.5 * (packet_size(phi_l) + packet_size(phi_r))
    report = PreparationReport(
        fidelity_to_target=min(abs(target.inner(psi)) ** 2, 1.0),
        left_weight=left_weight,
        right_weight=right_weight,
        excitation_fraction=float(min(max(1.0 - proj, 0.0), 1.0)),
        l0=l0,
        overlap_bound=math.exp(-L / l0),
        boundary_amplitude=boundary_amplitude(psi),
    )
    return psi, report


# --- bias quench ---------------------------------------------------------------------

def quench_schedule(grid: SpatialGrid, before, after, t_delta: float, shape: str = "smoothstep",
                    window=None) -> PotentialSchedule:
    return PotentialSchedule(grid, [Segment(0.0, t_delta, after, shape=shape, start=before)],
                             window=window)


def quench_bias(psi: ComplexField, schedule: PotentialSchedule, t_delta: float,
                config: PropagatorConfig, split: float | None = None):
    """Switch on the bias within t_delta and measure the motional excitation.

    Returns ``(psi_after, excitation_fraction)`` where the excitation is
    1 - sum over wells |<well ground|psi>|^2 against the single-well ground
    states of the post-quench potential.  ``t_delta = 0`` is an instantaneous
    switch.  Durations outside 1/omega < t_delta < hbar/Delta only warn.
    """
    grid = schedule.grid
    split = _split_point(schedule, split)
    final_params, _ = schedule.parameters_at(schedule.t_end)
    v_final = schedule.values_at(schedule.t_end)
    phi_l, phi_r = well_ground_states(v_final, config, grid, split)
    delta = energy(phi_r, v_final) - energy(phi_l, v_final)
    lo, hi = timing_window(final_params.omega, delta)
    if not lo < t_delta < hi:
        warnings.warn(
            f"t_delta = {t_delta:.4g} outside the window 1/omega = {lo:.4g} < t_delta < "
            f"hbar/Delta = {hi:.4g}",
            RuntimeWarning,
            stacklevel=2,
        )
    if t_delta > 0:
        span = schedule.t_end - schedule.t_start
        if abs(span - t_delta) > 1e-9 * max(1.0, t_delta):
            raise ValueError(f"schedule spans {span}, expected t_delta = {t_delta}")
        psi = evolve(psi, schedule, schedule.t_start, schedule.t_end, config)
    proj = abs(phi_l.inner(psi)) ** 2 + abs(phi_r.inner(psi)) ** 2
    return psi, float(min(max(1.0 - proj, 0.0), 1.0))


# --- adiabaticity estimate -----------------------------------------------------------

def even_gap(params, window, center: float, n: int = 1201) -> float:
    """Gap from the ground state to the next state of the same parity about ``center``.

    Uses a finite-difference Hamiltonian on a symmetric interval around the
    site, independent of the spectral machinery.
    """
    lo, hi = window
    half_width = max(center - lo, hi - center) + 1.0
    x = np.linspace(center - half_width, center + half_width, n)
    h = x[1] - x[0]
    if not isinstance(params, LatticeParams):
        raise TypeError("even_gap supports lattice parameters only")
    xe = np.clip(x, lo, hi)
    v = -params.V1 * np.sin(0.5 * np.pi * xe + params.phi) ** 2 - params.V2 * np.sin(np.pi * xe) ** 2
    c = HBAR**2 / (2.0 * MASS * h * h)
    evals, evecs = eigh_tridiagonal(2 * c + v, -c * np.ones(n - 1), select="i", select_range=(0, 7))
    parity = np.sign(np.sum(evecs * evecs[::-1], axis=0))
    e0, p0 = evals[0], parity[0]
    for e, p in zip(evals[1:], parity[1:]):
        if p == p0:
            return float(e - e0)
    return float(evals[-1] - e0)


def recommended_ramp_time(start: LatticeParams | None = None, end: LatticeParams | None = None,
                          window=(0.0, 2.0), factor: float = 50.0, n_samples: int = 11) -> float:
    """factor * 2 pi / (smallest same-parity gap along a linear path start -> end)."""
    start = start or LatticeParams(PREP_V1_START, 0.0, 0.0)
    end = end or LatticeParams(PREP_V1_END, PREP_V2, 0.0)
    center = 0.5 * (window[0] + window[1])
    gaps = []
    for s in np.linspace(0.0, 1.0, n_samples):
        params = LatticeParams((1 - s) * start.V1 + s * end.V1, (1 - s) * start.V2 + s * end.V2,
                               (1 - s) * start.phi + s * end.phi)
        gaps.append(even_gap(params, window, center))
    return factor * 2.0 * math.pi / min(gaps)
