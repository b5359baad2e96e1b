"""Lattice-averaged Ramsey signal in a global harmonic trap, and its spectrum.

Each occupied double well j sees the bias Delta_j = Delta + m omega_t^2 L x_j,
so the averaged population difference is a sum of slightly detuned cosines
with a phenomenological e^{-gamma t} envelope.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.fft as sfft
from scipy.optimize import brentq

from .grid import SpatialGrid
from .observables import default_sample_dt, write_csv
from .parallel import thread_count
from .potentials import DoubleWellModel, delta_from_position
from .propagator import (
    PropagationError,
    PropagatorConfig,
    check_boundary,
    double_well_grid,
    evolve,
    ideal_config,
    ideal_potential,
    ideal_superposition,
)
from .ramsey import run_ramsey
from .units import HBAR, L, RB87, harmonic_frequency

SIGNAL_MODES = ("closed_form", "full_quantum")
LAYOUTS = ("uniform", "random", "density")

# one double well per lattice period lambda = 2L
DEFAULT_WELL_SPACING = 2.0 * L


@dataclass(frozen=True)
class SignalConfig:
    """Parameters of the averaged signal.

    ``omega_t`` and ``gamma`` are in E_r/hbar, ``Delta`` in E_r, positions in
    L.  Leaving ``well_positions`` empty selects ``layout``; leaving
    ``sample_dt`` as None gives 64 samples per bias period.
    """

    n_wells: int = 40
    omega_t: float = RB87.hz_to_natural(50.0)
    Delta: float = 0.3
    gamma: float = 0.1
    well_positions: tuple = ()
    t_final: float = 100.0
    sample_dt: float | None = None
    mode: str = "closed_form"
    layout: str = "uniform"
    well_spacing: float = DEFAULT_WELL_SPACING
    layout_seed: int = 0
    V2: float = 35.0

    def __post_init__(self):
        if int(self.n_wells) != self.n_wells or self.n_wells < 1:
            raise ValueError(f"n_wells must be a positive integer, got {self.n_wells!r}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.omega_t < 0:
            raise ValueError(f"omega_t must be >= 0, got {self.omega_t}")
        if not self.t_final > 0:
            raise ValueError("t_final must be positive")
        if self.sample_dt is not None and not self.sample_dt > 0:
            raise ValueError("sample_dt must be positive")
        if self.mode not in SIGNAL_MODES:
            raise ValueError(f"mode must be one of {SIGNAL_MODES}, got {self.mode!r}")
        if self.layout not in LAYOUTS:
            raise ValueError(f"layout must be one of {LAYOUTS}, got {self.layout!r}")
        if not self.well_spacing > 0:
            raise ValueError("well_spacing must be positive")
        positions = tuple(float(x) for x in self.well_positions)
        if positions and len(positions) != self.n_wells:
            raise ValueError(
                f"well_positions has {len(positions)} entries but n_wells = {self.n_wells}"
            )
        object.__setattr__(self, "well_positions", positions)

    def positions(self) -> np.ndarray:
        if self.well_positions:
            return np.array(self.well_positions)
        return well_layout(self.n_wells, self.layout, self.well_spacing, self.layout_seed)

    def biases(self) -> np.ndarray:
        return self.Delta + delta_from_position(self.positions(), self.omega_t)

    def resolved_sample_dt(self) -> float:
        if self.sample_dt is not None:
            return self.sample_dt
        if self.Delta != 0:
            return default_sample_dt(self.Delta)
        return self.t_final / 400.0

    def times(self) -> np.ndarray:
        dt = self.resolved_sample_dt()
        return dt * np.arange(int(math.floor(self.t_final / dt + 1e-9)) + 1)


def well_layout(n: int, layout: str = "uniform", spacing: float = DEFAULT_WELL_SPACING,
                seed: int = 0) -> np.ndarray:
    """Centres of the occupied double wells, symmetric about the trap centre.

    ``uniform``: equally spaced.  ``random``: uniform draws over the same
    extent.  ``density``: quantiles of a parabolic (Thomas-Fermi-like)
    profile over the same extent, so sites crowd towards the centre.
    """
    half = 0.5 * spacing * n
    if layout == "uniform":
        return spacing * (np.arange(n) - 0.5 * (n - 1))
    if layout == "random":
        return np.sort(np.random.default_rng(seed).uniform(-half, half, n))
    if layout == "density":
        # CDF of (1 - q^2) on [-1, 1] is (2 + 3q - q^3) / 4
        targets = (np.arange(n) + 0.5) / n
        q = [brentq(lambda u, c=c: (2.0 + 3.0 * u - u**3) / 4.0 - c, -1.0, 1.0) for c in targets]
        return half * np.array(q)
    raise ValueError(f"layout must be one of {LAYOUTS}, got {layout!r}")


@dataclass(frozen=True)
class EnsembleSignal:
    times: np.ndarray
    signal: np.ndarray
    spectrum_freqs: np.ndarray | None = None
    spectrum_mag: np.ndarray | None = None
    peak_freq: float | None = None
    biases: np.ndarray = field(default=None, repr=False)

    @property
    def sample_dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def bin_width(self) -> float:
        """Angular-frequency spacing of the unpadded DFT."""
        return 2.0 * math.pi / (len(self.times) * self.sample_dt)

    def signal_rows(self):
        return zip(self.times, self.signal)

    def spectrum_rows(self):
        if self.spectrum_freqs is None:
            raise ValueError("spectrum not computed")
        return zip(self.spectrum_freqs, self.spectrum_mag)

    def to_csv(self, signal_path, spectrum_path=None):
        write_csv(signal_path, ("time", "signal"), self.signal_rows())
        if spectrum_path is not None:
            write_csv(spectrum_path, ("freq", "magnitude"), self.spectrum_rows())


def closed_form_signal(cfg: SignalConfig) -> EnsembleSignal:
    """(1 / 2N) sum_j cos(Delta_j t / hbar) e^{-gamma t}."""
    t = cfg.times()
    deltas = cfg.biases()
    s = np.cos(np.outer(t, deltas) / HBAR).sum(axis=1) / (2.0 * cfg.n_wells)
    return EnsembleSignal(t, s * np.exp(-cfg.gamma * t), biases=deltas)


def _well_signal(j, model, grid, times, config):
    out = np.empty(len(times))
    idx = {float(t): i for i, t in enumerate(times)}

    def observe(t, psi):
        out[idx[t]] = run_ramsey(psi, model.L, "real").difference

    try:
        psi0 = ideal_superposition(grid, model, config)
        psi = evolve(psi0, ideal_potential(model, grid), 0.0, float(times[-1]), config,
                     sample_times=times, observer=observe)
        check_boundary(psi, config)
    except (PropagationError, ValueError) as exc:
        raise PropagationError(f"well {j} (Delta_j = {model.Delta:.6g}): {exc}") from exc
    return out


def full_quantum_signal(cfg: SignalConfig, config: PropagatorConfig | None = None,
                        grid: SpatialGrid | None = None, threads: int | None = None) -> EnsembleSignal:
    """Average of simulated Ramsey readouts, one idealized double well per site.

    Every well starts in the equal two-well superposition of its own biased
    double well, evolves under Delta_j and is read out in the real quadrature
    at each sample time.  The same e^{-gamma t} envelope as the closed form is
    applied afterwards.
    """
    grid = double_well_grid() if grid is None else grid
    omega = harmonic_frequency(cfg.V2)
    models = [DoubleWellModel(omega, float(d)) for d in cfg.biases()]
    if config is None:
        # the largest |Delta_j| bounds both the potential maximum and its range
        config = ideal_config(grid, ideal_potential(max(models, key=lambda m: abs(m.Delta)), grid))
    times = cfg.times()
    threads = thread_count() if threads is None else int(threads)

    def run(j):
        return _well_signal(j, models[j], grid, times, config)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(run, range(cfg.n_wells)))
    else:
        rows = [run(j) for j in range(cfg.n_wells)]
    # ordered reduction keeps the result independent of the thread count
    total = np.zeros(len(times))
    for r in rows:
        total += r
    s = total / cfg.n_wells * np.exp(-cfg.gamma * times)
    return EnsembleSignal(times, s, biases=cfg.biases())


def ensemble_signal(cfg: SignalConfig, config: PropagatorConfig | None = None, **kw) -> EnsembleSignal:
    if cfg.mode == "closed_form":
        return closed_form_signal(cfg)
    return full_quantum_signal(cfg, config, **kw)


def spectrum(sig: EnsembleSignal, window: bool = False, pad_factor: int = 1) -> EnsembleSignal:
    """Magnitude of the DFT of the mean-subtracted signal on positive angular frequencies.

    Parameters
    ----------
    window
        Apply a Hann window before transforming.
    pad_factor
        Zero-pad to ``pad_factor`` times the record length (interpolates the
        spectrum; the resolution is still set by the record length).

    Returns
    -------
    EnsembleSignal
        Copy of ``sig`` with ``spectrum_freqs`` (E_r/hbar), ``spectrum_mag``
        (|DFT| times the sample spacing) and ``peak_freq``.
    """
    y = np.asarray(sig.signal, dtype=float)
    if len(y) < 8:
        raise ValueError(f"spectrum needs at least 8 samples, got {len(y)}")
    if int(pad_factor) != pad_factor or pad_factor < 1:
        raise ValueError("pad_factor must be a positive integer")
    dt = sig.sample_dt
    if not np.allclose(np.diff(sig.times), dt, rtol=1e-9, atol=0.0):
        raise ValueError("spectrum needs uniformly sampled data")
    y = y - y.mean()
    if window:
        y = y * np.hanning(len(y))
    n = len(y) * int(pad_factor)
    mag = np.abs(sfft.rfft(y, n=n)) * dt
    freqs = 2.0 * math.pi * sfft.rfftfreq(n, dt)
    peak = float(freqs[1 + int(np.argmax(mag[1:]))])
    return replace(sig, spectrum_freqs=freqs[1:], spectrum_mag=mag[1:], peak_freq=peak)


def fwhm(freqs: np.ndarray, mag: np.ndarray) -> float:
    """Full width at half maximum of the highest peak of ``mag`` (linear interpolation)."""
    freqs = np.asarray(freqs)
    mag = np.asarray(mag)
    k = int(np.argmax(mag))
    half = 0.5 * mag[k]
    lo = k
    while lo > 0 and mag[lo] > half:
        lo -= 1
    hi = k
    while hi < len(mag) - 1 and mag[hi] > half:
        hi += 1
    if mag[lo] > half or mag[hi] > half:
        raise ValueError("peak does not fall to half maximum inside the spectrum")
    f_lo = np.interp(half, [mag[lo], mag[lo + 1]], [freqs[lo], freqs[lo + 1]])
    f_hi = np.interp(half, [mag[hi], mag[hi - 1]], [freqs[hi], freqs[hi - 1]])
    return float(f_hi - f_lo)


def shot_noise_overlay(sig: EnsembleSignal, atoms_per_point: int, seed: int) -> EnsembleSignal:
    """Replace every point s by k/N - 1/2 with k ~ Binomial(N, 1/2 + s)."""
    if int(atoms_per_point) != atoms_per_point or atoms_per_point < 1:
        raise ValueError("atoms_per_point must be a positive integer")
    n = int(atoms_per_point)
    p = np.clip(0.5 + np.asarray(sig.signal, dtype=float), 0.0, 1.0)
    k = np.random.default_rng(seed).binomial(n, p)
    return replace(sig, signal=k / n - 0.5, spectrum_freqs=None, spectrum_mag=None, peak_freq=None)


def single_line_width(cfg: SignalConfig, pad_factor: int = 8) -> float:
    """FWHM of one undamped cosine at Delta over the same record: the resolution limit."""
    ref = replace(cfg, n_wells=1, well_positions=(0.0,), gamma=0.0, mode="closed_form",
                  sample_dt=cfg.resolved_sample_dt())
    s = spectrum(closed_form_signal(ref), pad_factor=pad_factor)
    return fwhm(s.spectrum_freqs, s.spectrum_mag)


def rms_difference(a: EnsembleSignal, b: EnsembleSignal) -> float:
    """RMS of the pointwise difference, relative to the 0.5 signal amplitude."""
    if len(a.signal) != len(b.signal):
        raise ValueError("signals have different lengths")
    return float(np.sqrt(np.mean((np.asarray(a.signal) - np.asarray(b.signal)) ** 2)) / 0.5)
