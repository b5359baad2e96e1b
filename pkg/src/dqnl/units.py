"""Natural units of the simulation and conversion to SI.

Everything inside the package is expressed with hbar = 1, the recoil energy
E_r = 1 and the well spacing L = lambda/2 = 1.  The lattice wavenumber is then
k = pi and the atomic mass is m = pi**2 / 2, so that E_r = hbar**2 k**2 / 2m
holds identically.  Times are in t0 = hbar / E_r, angular frequencies in
E_r / hbar, momenta in hbar / L.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

HBAR_SI = 1.054571817e-34  # J s

HBAR = 1.0
E_R = 1.0
L = 1.0
K = math.pi / L
MASS = HBAR**2 * K**2 / (2.0 * E_R)

# 87Rb in a lambda = 800 nm lattice, as quoted for the proposed experiment
RB87_MASS_KG = 1.45e-25
LATTICE_WAVELENGTH_M = 800e-9


@dataclass(frozen=True)
class UnitSystem:
    """SI scales behind the natural units for a given atom and laser."""

    mass_kg: float = RB87_MASS_KG
    wavelength_m: float = LATTICE_WAVELENGTH_M

    def __post_init__(self):
        if self.mass_kg <= 0 or self.wavelength_m <= 0:
            raise ValueError("mass and wavelength must be positive")

    @property
    def hbar(self) -> float:
        return HBAR

    @property
    def mass(self) -> float:
        """Atomic mass in natural units (always pi**2 / 2)."""
        return MASS

    @property
    def k_si(self) -> float:
        return 2.0 * math.pi / self.wavelength_m

    @property
    def length_m(self) -> float:
        """L = lambda / 2 in metres."""
        return self.wavelength_m / 2.0

    @property
    def recoil_energy_j(self) -> float:
        return HBAR_SI**2 * self.k_si**2 / (2.0 * self.mass_kg)

    @property
    def time_s(self) -> float:
        """t0 = hbar / E_r in seconds."""
        return HBAR_SI / self.recoil_energy_j

    def angular_frequency_to_natural(self, omega_rad_s: float) -> float:
        return omega_rad_s * self.time_s

    def angular_frequency_to_si(self, omega: float) -> float:
        return omega / self.time_s

    def hz_to_natural(self, f_hz: float) -> float:
        """Convert an ordinary frequency f (Hz) to the angular 2 pi f in E_r/hbar."""
        return self.angular_frequency_to_natural(2.0 * math.pi * f_hz)

    def length_to_si(self, x: float) -> float:
        return x * self.length_m

    def time_to_si(self, t: float) -> float:
        return t * self.time_s


RB87 = UnitSystem()


def harmonic_frequency(v2: float) -> float:
    """Trap frequency 2 sqrt(V2 E_r)/hbar of a sin^2 lattice well of depth V2."""
    if v2 < 0:
        raise ValueError("lattice depth must be non-negative")
    return 2.0 * math.sqrt(v2 * E_R) / HBAR


def oscillator_length(omega: float, mass: float = MASS) -> float:
    """Ground-state size l0 = sqrt(hbar / m omega)."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    return math.sqrt(HBAR / (mass * omega))
