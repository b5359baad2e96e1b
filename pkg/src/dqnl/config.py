"""Flat, strictly validated run configuration read from TOML."""
from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, fields

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .units import LATTICE_WAVELENGTH_M, RB87_MASS_KG, UnitSystem

EXPERIMENTS = (
    "prepare",
    "track_displacement",
    "ramsey_scan",
    "classical_compare",
    "ensemble_signal",
    "validate",
)


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class RunConfig:
    """Every setting of a run.  Times in hbar/E_r, energies in E_r, lengths in L.

    ``V1`` is the long-lattice depth at the end of the splitting ramp and
    ``phi`` the lattice phase that the bias quench moves to; the post-quench
    ``V1`` is solved for so that the two wells differ by ``Delta``.

    ``None`` means "derive a default for the chosen experiment"; the resolved
    values are written to the run metadata.
    """

    experiment: str
    seed: int = 0
    # unit system
    mass_kg: float = RB87_MASS_KG
    wavelength_m: float = LATTICE_WAVELENGTH_M
    # grid
    n_points: int | None = None
    x_min: float | None = None
    x_max: float | None = None
    # lattice and physics
    V1: float = 5.0
    V2: float = 35.0
    phi: float = math.pi / 4
    Delta: float = 0.3
    theta: float = 0.0
    omega_t_hz: float = 50.0
    gamma: float = 0.1
    n_wells: int = 40
    # preparation and quench
    ramp_time: float | None = None
    ramp_shape: str = "smoothstep"
    t_delta: float | None = None
    # numerics
    dt: float | None = None
    t_final: float | None = None
    sample_dt: float | None = None
    n_trajectories: int = 10000
    classical_dt: float | None = None
    classical_ensemble: str = "wigner"
    # ensemble signal
    signal_mode: str = "closed_form"
    well_layout: str = "uniform"
    well_spacing: float = 2.0
    hann_window: bool = False
    atoms_per_point: int = 0

    @property
    def units(self) -> UnitSystem:
        return UnitSystem(self.mass_kg, self.wavelength_m)

    @property
    def omega_t(self) -> float:
        """Global-trap angular frequency in E_r/hbar."""
        return self.units.hz_to_natural(self.omega_t_hz)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_CHOICES = {
    "experiment": EXPERIMENTS,
    "ramp_shape": ("linear", "smoothstep"),
    "classical_ensemble": ("wigner", "microcanonical"),
    "signal_mode": ("closed_form", "full_quantum"),
    "well_layout": ("uniform", "random", "density"),
}
_POSITIVE = {"mass_kg", "wavelength_m", "ramp_time", "dt", "t_final", "sample_dt",
             "n_trajectories", "classical_dt", "n_wells", "well_spacing", "n_points"}
_NON_NEGATIVE = {"V1", "V2", "gamma", "omega_t_hz", "t_delta", "atoms_per_point", "seed"}


def _field_types():
    return {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, value, type_name: str):
    base = type_name.replace(" | None", "")
    if value is None:
        if "None" in type_name:
            return None
        raise ConfigError(key, "may not be empty")
    if base == "str":
        if not isinstance(value, str):
            raise ConfigError(key, f"expected a string, got {value!r}")
        return value
    if base == "bool":
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected true or false, got {value!r}")
        return value
    if isinstance(value, bool):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if base == "int":
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return value
    if not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(key, f"must be finite, got {value!r}")
    return value


def from_mapping(data: dict) -> RunConfig:
    """Validate a flat mapping of settings and apply defaults."""
    types = _field_types()
    for key in data:
        if key not in types:
            raise ConfigError(key, "unknown key")
    if "experiment" not in data:
        raise ConfigError("experiment", f"missing required key (one of {', '.join(EXPERIMENTS)})")
    values = {}
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError(key, "nested tables are not supported; use flat keys")
        values[key] = _coerce(key, value, types[key])
    for key, choices in _CHOICES.items():
        if key in values and values[key] not in choices:
            raise ConfigError(key, f"must be one of {', '.join(choices)}, got {values[key]!r}")
    for key, value in values.items():
        if value is None:
            continue
        if key in _POSITIVE and not value > 0:
            raise ConfigError(key, f"must be > 0, got {value!r}")
        if key in _NON_NEGATIVE and value < 0:
            raise ConfigError(key, f"must be >= 0, got {value!r}")
    n = values.get("n_points")
    if n is not None and n < 8:
        raise ConfigError("n_points", f"must be >= 8, got {n}")
    x_min, x_max = values.get("x_min"), values.get("x_max")
    if (x_min is None) != (x_max is None):
        raise ConfigError("x_min" if x_min is None else "x_max", "give both x_min and x_max")
    if x_min is not None and not x_max > x_min:
        raise ConfigError("x_max", f"must exceed x_min ({x_min}), got {x_max}")
    return RunConfig(**values)


def parse_config(text: str) -> RunConfig:
    """Parse a TOML document of flat ``key = value`` pairs into a :class:`RunConfig`."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<document>", f"not valid TOML: {exc}") from exc
    return from_mapping(data)


def load_config(path) -> RunConfig:
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    return parse_config(text)
