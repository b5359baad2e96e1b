import numpy as np
import pytest

from dqnl.grid import SpatialGrid
from dqnl.potentials import DoubleWellModel
from dqnl.propagator import double_well_grid, ideal_config, ideal_potential, ideal_superposition


@pytest.fixture(scope="session")
def ideal_grid():
    return double_well_grid()


@pytest.fixture(scope="session")
def biased_model():
    return DoubleWellModel.from_lattice_depth(35.0, 0.3)


@pytest.fixture(scope="session")
def ideal_setup(ideal_grid, biased_model):
    v = ideal_potential(biased_model, ideal_grid)
    cfg = ideal_config(ideal_grid, v)
    psi0 = ideal_superposition(ideal_grid, biased_model, cfg)
    return ideal_grid, biased_model, v, cfg, psi0


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_state(grid: SpatialGrid, rng, bandwidth=40.0):
    """Random band-limited normalized state."""
    from dqnl.grid import ComplexField

    vals = rng.normal(size=grid.n_points) + 1j * rng.normal(size=grid.n_points)
    vals = np.fft.ifft(np.fft.fft(vals) * np.exp(-(grid.p / bandwidth) ** 2))
    return ComplexField(grid, vals).normalized()


ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line for an acceptance criterion."""

    def record(number, title, passed, detail):
        line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
