"""Spin-dependent Ramsey sequence that reads out Re/Im of the displacement expectation.

Sequence: pi/2 pulse (phase 0 or pi/2), spin-dependent shift of +-L/2, a
second pi/2 pulse with phase 0, then population readout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import ComplexField, translate

QUADRATURES = ("real", "imaginary")


@dataclass(frozen=True)
class SpinorField:
    """Two motional components on one grid, for internal states up and down."""

    up: ComplexField
    down: ComplexField

    def __post_init__(self):
        if self.up.grid != self.down.grid:
            raise ValueError("spinor components must share a grid")
        if self.up.space != "x" or self.down.space != "x":
            raise ValueError("spinor components must be position-space fields")

    @classmethod
    def spin_up(cls, psi: ComplexField) -> "SpinorField":
        return cls(psi, psi.with_values(np.zeros_like(psi.values)))

    @classmethod
    def spin_down(cls, psi: ComplexField) -> "SpinorField":
        return cls(psi.with_values(np.zeros_like(psi.values)), psi)

    @property
    def grid(self):
        return self.up.grid

    def norm2(self) -> float:
        return self.up.norm2() + self.down.norm2()


@dataclass(frozen=True)
class MeasurementResult:
    p_up: float
    p_down: float
    quadrature: str = "real"

    @property
    def difference(self) -> float:
        """P_down - P_up."""
        return self.p_down - self.p_up


def _check_quadrature(quadrature: str) -> float:
    if quadrature not in QUADRATURES:
        raise ValueError(f"quadrature must be one of {QUADRATURES}, got {quadrature!r}")
    return 0.0 if quadrature == "real" else math.pi / 2


def pi_half_pulse(s: SpinorField, pulse_phase: float = 0.0, angle_error: float = 0.0) -> SpinorField:
    """Rotate every grid point's spin by pi/2 (+ ``angle_error``) about an equatorial axis.

    |up> -> (|up> + e^{i phase}|down>)/sqrt2 and
    |down> -> (-e^{-i phase}|up> + |down>)/sqrt2 for ``angle_error = 0``.
    """
    half = 0.5 * (0.5 * math.pi + angle_error)
    c, sn = math.cos(half), math.sin(half)
    e = complex(math.cos(pulse_phase), math.sin(pulse_phase))
    u, d = s.up.values, s.down.values
    new_up = c * u - sn * e.conjugate() * d
    new_down = sn * e * u + c * d
    return SpinorField(s.up.with_values(new_up), s.down.with_values(new_down))


def spin_dependent_shift(s: SpinorField, half_shift: float) -> SpinorField:
    """Up component -> psi(x + half_shift), down component -> psi(x - half_shift)."""
    return SpinorField(translate(s.up, half_shift), translate(s.down, -half_shift))


def measure_populations(s: SpinorField, quadrature: str = "real") -> MeasurementResult:
    p_up, p_down = s.up.norm2(), s.down.norm2()
    total = p_up + p_down
    return MeasurementResult(p_up / total, p_down / total, quadrature)


def ramsey_sequence(psi_t: ComplexField, L: float, quadrature: str = "real",
                    angle_error: float = 0.0) -> SpinorField:
    """Final spinor after both pulses, starting from |up> x psi_t."""
    phase = _check_quadrature(quadrature)
    s = SpinorField.spin_up(psi_t)
    s = pi_half_pulse(s, phase, angle_error)
    s = spin_dependent_shift(s, 0.5 * L)
    return pi_half_pulse(s, 0.0, angle_error)


def run_ramsey(psi_t: ComplexField, L: float, quadrature: str = "real",
               angle_error: float = 0.0) -> MeasurementResult:
    """P_down - P_up equals Re (or Im) of <psi_t| D_L |psi_t>."""
    return measure_populations(ramsey_sequence(psi_t, L, quadrature, angle_error), quadrature)


def ramsey_quadratures(psi_t: ComplexField, L: float) -> complex:
    """Both quadratures combined into one complex estimate of <D_L>."""
    re = run_ramsey(psi_t, L, "real").difference
    im = run_ramsey(psi_t, L, "imaginary").difference
    return complex(re, im)
