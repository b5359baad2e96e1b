"""Lattice, double-well and global-trap potentials and their time schedules."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Sequence, Union

import numpy as np

from .grid import ComplexField, SpatialGrid
from .units import E_R, HBAR, K, L, MASS, harmonic_frequency

RAMP_SHAPES = ("constant", "linear", "smoothstep")


@dataclass(frozen=True)
class LatticeParams:
    """V(x) = -V1 sin^2(k x / 2 + phi) - V2 sin^2(k x), energies in E_r."""

    V1: float = 0.0
    V2: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if self.V1 < 0 or self.V2 < 0:
            raise ValueError(f"lattice depths must be >= 0 (V1={self.V1}, V2={self.V2})")

    @property
    def k(self) -> float:
        return K

    @property
    def omega(self) -> float:
        """Harmonic frequency of the V2 wells."""
        return harmonic_frequency(self.V2)


@dataclass(frozen=True)
class DoubleWellModel:
    """Two identical harmonic wells at -L/2 and +L/2; the right one raised by Delta."""

    omega: float
    Delta: float = 0.0
    L: float = L

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.L <= 0:
            raise ValueError("L must be positive")

    @classmethod
    def from_lattice_depth(cls, V2: float, Delta: float = 0.0) -> "DoubleWellModel":
        return cls(omega=harmonic_frequency(V2), Delta=Delta)

    @property
    def spring(self) -> float:
        return MASS * self.omega**2

    def force(self, x):
        """-dV/dx; the bias never enters."""
        x = np.asarray(x, dtype=float)
        centre = np.where(x < 0.0, -0.5 * self.L, 0.5 * self.L)
        return -self.spring * (x - centre)


@dataclass(frozen=True)
class GlobalTrap:
    """Harmonic envelope m omega_t^2 (x - center)^2 / 2; omega_t in E_r/hbar."""

    omega_t: float = 0.0
    center: float = 0.0

    def __post_init__(self):
        if self.omega_t < 0:
            raise ValueError("omega_t must be >= 0")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return 0.5 * MASS * self.omega_t**2 * (x - self.center) ** 2


PotentialParams = Union[LatticeParams, DoubleWellModel]


def _lattice_values(params: LatticeParams, x: np.ndarray) -> np.ndarray:
    return -params.V1 * np.sin(0.5 * K * x + params.phi) ** 2 - params.V2 * np.sin(K * x) ** 2


def _double_well_values(model: DoubleWellModel, x: np.ndarray) -> np.ndarray:
    half = 0.5 * model.L
    left = 0.5 * model.spring * (x + half) ** 2
    right = 0.5 * model.spring * (x - half) ** 2 + model.Delta
    return np.where(x < 0.0, left, right)


def _window(x: np.ndarray, window) -> np.ndarray:
    if window is None:
        return x
    lo, hi = window
    return np.clip(x, lo, hi)


def potential_values(params: PotentialParams, grid: SpatialGrid, window=None) -> np.ndarray:
    """Real potential array for either representation.

    ``window=(lo, hi)`` isolates one lattice cell: outside it the potential is
    held at its value on the nearest window edge.
    """
    x = _window(grid.x, window)
    if isinstance(params, LatticeParams):
        return _lattice_values(params, x)
    if isinstance(params, DoubleWellModel):
        return _double_well_values(params, x)
    raise TypeError(f"unsupported potential parameters {type(params).__name__}")


def lattice_potential(params: LatticeParams, grid: SpatialGrid, window=None) -> ComplexField:
    return ComplexField(grid, potential_values(params, grid, window))


def double_well_potential(model: DoubleWellModel, grid: SpatialGrid) -> ComplexField:
    """Left parabola for x < 0, right parabola plus Delta for x >= 0."""
    return ComplexField(grid, potential_values(model, grid))


def smoothstep(u):
    return u * u * (3.0 - 2.0 * u)


def _interpolate(a, b, s):
    if type(a) is not type(b):
        raise TypeError(
            f"cannot ramp between {type(a).__name__} and {type(b).__name__}"
        )
    changes = {f.name: (1.0 - s) * getattr(a, f.name) + s * getattr(b, f.name)
               for f in fields(a)}
    return replace(a, **changes)


@dataclass(frozen=True)
class Segment:
    """One piece of a schedule.

    Non-constant segments ramp from the previous segment's parameters (or
    ``start`` when given) to ``params`` at ``t_end``.
    """

    t_start: float
    t_end: float
    params: PotentialParams
    trap: GlobalTrap = GlobalTrap()
    shape: str = "constant"
    start: PotentialParams | None = None
    start_trap: GlobalTrap | None = None

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError(f"segment must have t_end > t_start ({self.t_start}, {self.t_end})")
        if self.shape not in RAMP_SHAPES:
            raise ValueError(f"ramp shape must be one of {RAMP_SHAPES}, got {self.shape!r}")


class PotentialSchedule:
    """Piecewise time-dependent potential on a fixed grid."""

    def __init__(self, grid: SpatialGrid, segments: Sequence[Segment], window=None,
                 tol: float = 1e-12):
        if not segments:
            raise ValueError("schedule needs at least one segment")
        segments = list(segments)
        resolved = []
        prev = None
        for seg in segments:
            if prev is not None and abs(seg.t_start - prev.t_end) > tol * max(1.0, abs(prev.t_end)):
                raise ValueError(
                    f"segments must be contiguous: {prev.t_end} then {seg.t_start}"
                )
            if seg.shape != "constant" and seg.start is None:
                if prev is None:
                    raise ValueError("first segment must be constant or give start params")
                seg = replace(seg, start=prev.params)
            if seg.shape != "constant" and seg.start_trap is None:
                seg = replace(seg, start_trap=prev.trap if prev is not None else seg.trap)
            resolved.append(seg)
            prev = seg
        self.grid = grid
        self.segments = tuple(resolved)
        self.window = None if window is None else (float(window[0]), float(window[1]))
        self._cache: dict = {}

    @classmethod
    def static(cls, grid: SpatialGrid, params: PotentialParams, t_end: float = 1.0,
               trap: GlobalTrap = GlobalTrap(), window=None) -> "PotentialSchedule":
        return cls(grid, [Segment(0.0, t_end, params, trap)], window=window)

    @property
    def t_start(self) -> float:
        return self.segments[0].t_start

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    @property
    def is_static(self) -> bool:
        return all(s.shape == "constant" for s in self.segments) and len(
            {(s.params, s.trap) for s in self.segments}) == 1

    def _segment_at(self, t: float) -> Segment:
        span_tol = 1e-12 * max(1.0, abs(self.t_end))
        if t < self.t_start - span_tol or t > self.t_end + span_tol:
            raise ValueError(f"time {t} outside schedule span [{self.t_start}, {self.t_end}]")
        for seg in self.segments:
            if t <= seg.t_end:
                return seg
        return self.segments[-1]

    def parameters_at(self, t: float):
        """(params, trap) in force at time t."""
        seg = self._segment_at(t)
        if seg.shape == "constant":
            return seg.params, seg.trap
        u = min(max((t - seg.t_start) / (seg.t_end - seg.t_start), 0.0), 1.0)
        s = u if seg.shape == "linear" else smoothstep(u)
        return _interpolate(seg.start, seg.params, s), _interpolate(seg.start_trap, seg.trap, s)

    def values_at(self, t: float) -> np.ndarray:
        params, trap = self.parameters_at(t)
        key = (params, trap)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        v = potential_values(params, self.grid, self.window)
        if trap.omega_t > 0:
            v = v + trap.evaluate(self.grid.x)
        v.setflags(write=False)
        if len(self._cache) < 16:
            self._cache[key] = v
        return v

    def max_abs(self, n_samples: int = 65) -> float:
        """Largest |V| over the schedule (sampled on segment ends and interiors)."""
        best = 0.0
        for seg in self.segments:
            ts = [seg.t_start, seg.t_end] if seg.shape == "constant" else np.linspace(
                seg.t_start, seg.t_end, n_samples)
            for t in ts:
                best = max(best, float(np.max(np.abs(self.values_at(float(t))))))
        return best


def evaluate_schedule(schedule: PotentialSchedule, t: float) -> ComplexField:
    return ComplexField(schedule.grid, schedule.values_at(float(t)))


def lattice_site_center(phi: float) -> float:
    """Minimum of -sin^2(k x/2 + phi) nearest the origin on the positive side."""
    return (math.pi / 2 - phi) * 2.0 / K


def delta_from_position(x: np.ndarray, omega_t: float) -> np.ndarray:
    """Bias shift delta_j = m omega_t^2 L x_j from the global trap gradient."""
    return MASS * omega_t**2 * L * np.asarray(x, dtype=float)


def timing_window(omega: float, Delta: float) -> tuple[float, float]:
    """(1/omega, hbar/Delta): the slow-compared-to-trap, fast-compared-to-bias window."""
    upper = math.inf if Delta == 0 else HBAR / abs(Delta)
    return 1.0 / omega, upper


__all__ = [
    "E_R",
    "LatticeParams",
    "DoubleWellModel",
    "GlobalTrap",
    "Segment",
    "PotentialSchedule",
    "lattice_potential",
    "double_well_potential",
    "evaluate_schedule",
    "potential_values",
    "delta_from_position",
    "timing_window",
]
