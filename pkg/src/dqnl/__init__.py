"""Single-atom double-well interferometry: displacement-operator dynamics,
Ramsey readout, classical comparison and lattice-averaged signals."""

__version__ = "0.1.0"

from .grid import ComplexField, SpatialGrid, translate  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .observables import analytic_displacement, displacement_expectation  # noqa: E402
from .potentials import DoubleWellModel, GlobalTrap, LatticeParams, PotentialSchedule  # noqa: E402
from .propagator import PropagatorConfig, evolve, ground_state  # noqa: E402
from .ramsey import SpinorField, run_ramsey  # noqa: E402

__all__ = [
    "__version__",
    "BACKEND",
    "ComplexField",
    "SpatialGrid",
    "translate",
    "analytic_displacement",
    "displacement_expectation",
    "DoubleWellModel",
    "GlobalTrap",
    "LatticeParams",
    "PotentialSchedule",
    "PropagatorConfig",
    "evolve",
    "ground_state",
    "SpinorField",
    "run_ramsey",
]
