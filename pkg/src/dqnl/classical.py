"""Classical trajectory ensemble in the piecewise-harmonic double well.

The classical counterpart of the displacement operator is D_C = exp(i p L / hbar),
whose time derivative involves only the local force.  Because the bias Delta
exerts no force, nothing in this module depends on it.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .observables import write_csv
from .parallel import thread_count
from .potentials import DoubleWellModel
from .units import HBAR, MASS, oscillator_length

ENSEMBLE_KINDS = ("wigner", "microcanonical")


class ClassicalDomainError(RuntimeError):
    """A trajectory left the region that the quantum grid would cover."""


@dataclass(frozen=True)
class ClassicalEnsemble:
    x: np.ndarray
    p: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=float)
        p = np.ascontiguousarray(self.p, dtype=float)
        w = np.ascontiguousarray(self.weights, dtype=float)
        if not (x.shape == p.shape == w.shape) or x.ndim != 1:
            raise ValueError("x, p and weights must be 1D arrays of equal length")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
        for name, arr in (("x", x), ("p", p), ("weights", w)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.x.shape[0]


def sample_matched_ensemble(model: DoubleWellModel, n: int, seed: int,
                            kind: str = "wigner") -> ClassicalEnsemble:
    """Phase-space sample matched to the two-well ground-state superposition.

    ``kind="wigner"`` draws from the Gaussian Wigner function of the oscillator
    ground state (position std l0/sqrt2, momentum std hbar/(sqrt2 l0)).
    ``kind="microcanonical"`` puts every trajectory on the shell of energy
    hbar omega / 2 with a uniform phase angle.  The first half of the
    trajectories sit in the left well, the rest in the right one.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if kind not in ENSEMBLE_KINDS:
        raise ValueError(f"kind must be one of {ENSEMBLE_KINDS}, got {kind!r}")
    n = int(n)
    rng = np.random.default_rng(seed)
    l0 = oscillator_length(model.omega)
    n_left = n // 2 + (n % 2) * int(rng.integers(2))
    centres = np.where(np.arange(n) < n_left, -0.5 * model.L, 0.5 * model.L)
    if kind == "wigner":
        x = centres + rng.normal(0.0, l0 / math.sqrt(2.0), n)
        p = rng.normal(0.0, HBAR / (math.sqrt(2.0) * l0), n)
    else:
        a = rng.uniform(0.0, 2.0 * math.pi, n)
        x = centres + l0 * np.cos(a)
        p = HBAR / l0 * np.sin(a)
    return ClassicalEnsemble(x, p, np.full(n, 1.0 / n))


@dataclass(frozen=True)
class ClassicalDisplacementSeries:
    """<D_C>(t) and the ensemble average of dD_C/dt = (L/i hbar) e^{ipL/hbar} V'(x)."""

    times: np.ndarray
    values: np.ndarray
    derivative_values: np.ndarray
    derivative_stderr: np.ndarray
    energy_drift: float
    L: float
    Delta: float

    def rows(self):
        for t, d, dd in zip(self.times, self.values, self.derivative_values):
            yield t, d.real, d.imag, dd.real, dd.imag

    def to_csv(self, path):
        write_csv(path, ("time", "re_DC", "im_DC", "re_dDCdt", "im_dDCdt"), self.rows())


def _energy(x, p, model):
    c = np.where(x < 0.0, -0.5 * model.L, 0.5 * model.L)
    return p * p / (2.0 * MASS) + 0.5 * model.spring * (x - c) ** 2


def _observables(x, p, w, model):
    phase = np.exp(1j * p * model.L / HBAR)
    rhs = (model.L / (1j * HBAR)) * phase * (-model.force(x))
    d = np.sum(w * phase)
    dd = np.sum(w * rhs)
    # weighted standard error, separately for real and imaginary parts
    neff = 1.0 / np.sum(w * w)
    var_re = np.sum(w * (rhs.real - dd.real) ** 2)
    var_im = np.sum(w * (rhs.imag - dd.imag) ** 2)
    se = complex(math.sqrt(var_re / neff), math.sqrt(var_im / neff))
    return d, dd, se


def _advance(kernel, x, p, n_steps, dt, model, threads):
    args = (int(n_steps), float(dt), MASS, model.spring, 0.5 * model.L)
    if threads <= 1 or len(x) < 2 * threads:
        kernel(x, p, *args)
        return
    bounds = np.linspace(0, len(x), threads + 1).astype(int)
    # trajectories are independent, so chunking does not change any result
    with ThreadPoolExecutor(threads) as pool:
        list(pool.map(lambda ab: kernel(x[ab[0]:ab[1]], p[ab[0]:ab[1]], *args),
                      zip(bounds[:-1], bounds[1:])))


def default_classical_dt(omega: float) -> float:
    """Step small enough for a relative energy error below 1e-6 (omega dt = 1e-3)."""
    return 1e-3 / omega


def evolve_classical(ens: ClassicalEnsemble, model: DoubleWellModel, t_final: float,
                     dt: float | None = None, sample_dt: float | None = None,
                     backend: str | None = None, domain: float | None = None,
                     threads: int | None = None) -> ClassicalDisplacementSeries:
    """Leapfrog-integrate every trajectory and record ensemble averages.

    Parameters
    ----------
    ens
        Initial phase-space points and their weights.
    model
        Piecewise-harmonic double well.  ``model.Delta`` is carried into the
        output for bookkeeping only.
    t_final, dt, sample_dt
        Run length, integrator step (defaults to :func:`default_classical_dt`)
        and output spacing (defaults to ``dt``); ``sample_dt`` is rounded to a
        whole number of steps.
    backend
        ``"cython"``, ``"python"`` or None for the import-time default.
    domain
        Trajectories must stay inside ``|x| <= domain`` (default 1.4 L).

    Raises
    ------
    ValueError
        If ``dt`` does not resolve the trap period (``dt > 2 pi / (20 omega)``).
    ClassicalDomainError
        If a trajectory leaves the domain.
    """
    if dt is None:
        dt = default_classical_dt(model.omega)
    if not dt > 0:
        raise ValueError("dt must be positive")
    if dt > 2.0 * math.pi / (20.0 * model.omega):
        raise ValueError(
            f"dt={dt} does not resolve the trap period; need dt <= {2 * math.pi / (20 * model.omega):.4g}"
        )
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    kernel = kernels.get_kernel(backend)
    threads = thread_count() if threads is None else int(threads)
    domain = 1.4 * model.L if domain is None else float(domain)
    steps_per_sample = max(1, int(round((dt if sample_dt is None else sample_dt) / dt)))
    n_samples = int(round(t_final / (steps_per_sample * dt)))

    x = np.array(ens.x, dtype=float)
    p = np.array(ens.p, dtype=float)
    w = ens.weights
    e0 = _energy(x, p, model)
    scale = np.maximum(np.abs(e0), np.finfo(float).tiny)

    times = steps_per_sample * dt * np.arange(n_samples + 1)
    values = np.empty(n_samples + 1, dtype=complex)
    deriv = np.empty_like(values)
    stderr = np.empty_like(values)
    drift = 0.0
    for i in range(n_samples + 1):
        if i:
            _advance(kernel, x, p, steps_per_sample, dt, model, threads)
        if np.any(np.abs(x) > domain):
            bad = int(np.argmax(np.abs(x) > domain))
            raise ClassicalDomainError(
                f"trajectory {bad} reached x={x[bad]:.3f} outside |x| <= {domain} at t={times[i]:.4g}"
            )
        values[i], deriv[i], stderr[i] = _observables(x, p, w, model)
        drift = max(drift, float(np.max(np.abs(_energy(x, p, model) - e0) / scale)))
    return ClassicalDisplacementSeries(times, values, deriv, stderr, drift, model.L, model.Delta)


def finite_difference_derivative(series: ClassicalDisplacementSeries) -> np.ndarray:
    """Central-difference d<D_C>/dt at the interior sample times."""
    t, d = series.times, series.values
    return (d[2:] - d[:-2]) / (t[2:] - t[:-2])
