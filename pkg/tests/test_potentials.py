import math

import numpy as np
import pytest

from dqnl.grid import SpatialGrid
from dqnl.potentials import (
    DoubleWellModel,
    GlobalTrap,
    LatticeParams,
    PotentialSchedule,
    Segment,
    delta_from_position,
    double_well_potential,
    lattice_potential,
    lattice_site_center,
    potential_values,
    timing_window,
)
from dqnl.units import MASS, RB87


GRID = SpatialGrid(400, -1, 3)


def test_lattice_formula_and_curvature():
    p = LatticeParams(V1=2.0, V2=35.0, phi=0.3)
    v = lattice_potential(p, GRID).values.real
    x = GRID.x
    assert np.allclose(v, -2 * np.sin(np.pi * x / 2 + 0.3) ** 2 - 35 * np.sin(np.pi * x) ** 2)
    # small-oscillation frequency of a V2 well: m omega^2 = V''(0) = 2 V2 pi^2
    only_v2 = LatticeParams(0.0, 35.0)
    assert MASS * only_v2.omega**2 == pytest.approx(2 * 35 * math.pi**2)


def test_lattice_rejects_negative_depth():
    with pytest.raises(ValueError):
        LatticeParams(V1=-1)


def test_window_clamps_to_edge_values():
    p = LatticeParams(5.0, 35.0)
    v = potential_values(p, GRID, window=(0.0, 2.0))
    inside = (GRID.x >= 0) & (GRID.x <= 2)
    assert np.allclose(v[inside], potential_values(p, GRID)[inside])
    assert np.allclose(v[GRID.x < 0], -5 * np.sin(0.0) ** 2)


def test_double_well_values():
    m = DoubleWellModel(omega=10.0, Delta=0.3)
    g = SpatialGrid(200, -1, 1)
    v = double_well_potential(m, g).values.real
    left = g.x < 0
    assert np.allclose(v[left], 0.5 * m.spring * (g.x[left] + 0.5) ** 2)
    assert np.allclose(v[~left], 0.5 * m.spring * (g.x[~left] - 0.5) ** 2 + 0.3)
    assert potential_values(m, g)[np.argmin(np.abs(g.x - 0.5))] == pytest.approx(0.3)


def test_double_well_force_ignores_bias():
    x = np.linspace(-1, 1, 11)
    a = DoubleWellModel(10.0, 0.0).force(x)
    b = DoubleWellModel(10.0, 0.7).force(x)
    assert np.array_equal(a, b)
    assert DoubleWellModel(10.0).force(0.5) == 0.0


def test_double_well_validation():
    with pytest.raises(ValueError):
        DoubleWellModel(omega=0)
    with pytest.raises(ValueError):
        DoubleWellModel(omega=1, L=-1)


def test_global_trap():
    trap = GlobalTrap(omega_t=0.5, center=1.0)
    assert trap.evaluate(np.array([1.0, 2.0])) == pytest.approx([0.0, 0.5 * MASS * 0.25])
    with pytest.raises(ValueError):
        GlobalTrap(-1.0)


def test_schedule_ramp_interpolates_with_smoothstep():
    a, b = LatticeParams(30, 0, 0), LatticeParams(5, 35, 0)
    s = PotentialSchedule(GRID, [Segment(0, 1, a), Segment(1, 3, b, shape="smoothstep")])
    assert s.parameters_at(1.0)[0] == a
    assert s.parameters_at(3.0)[0] == b
    mid = s.parameters_at(2.0)[0]
    assert mid.V1 == pytest.approx(17.5) and mid.V2 == pytest.approx(17.5)
    quarter = s.parameters_at(1.5)[0]
    assert quarter.V2 == pytest.approx(35 * (0.25**2 * (3 - 0.5)))
    assert not s.is_static


def test_schedule_linear_and_trap():
    s = PotentialSchedule(GRID, [Segment(0, 2, LatticeParams(0, 10), GlobalTrap(1.0), shape="linear",
                                         start=LatticeParams(0, 0), start_trap=GlobalTrap(0.0))])
    params, trap = s.parameters_at(0.5)
    assert params.V2 == pytest.approx(2.5)
    assert trap.omega_t == pytest.approx(0.25)
    v = s.values_at(2.0)
    assert np.allclose(v, potential_values(LatticeParams(0, 10), GRID) + GlobalTrap(1.0).evaluate(GRID.x))
    with pytest.raises(ValueError):
        v[0] = 0


@pytest.mark.parametrize("segments", [
    [],
    [Segment(0, 1, LatticeParams(1, 1)), Segment(1.5, 2, LatticeParams(1, 1))],
    [Segment(0, 1, LatticeParams(1, 1), shape="linear")],
])
def test_schedule_rejects_bad_segments(segments):
    with pytest.raises(ValueError):
        PotentialSchedule(GRID, segments)


def test_segment_validation():
    with pytest.raises(ValueError):
        Segment(1, 1, LatticeParams())
    with pytest.raises(ValueError):
        Segment(0, 1, LatticeParams(), shape="cubic")


def test_schedule_time_outside_span():
    s = PotentialSchedule.static(GRID, LatticeParams(1, 1), t_end=2.0)
    assert s.is_static
    with pytest.raises(ValueError):
        s.parameters_at(2.5)


def test_cannot_ramp_between_model_types():
    s = PotentialSchedule(GRID, [Segment(0, 1, LatticeParams(1, 1)),
                                 Segment(1, 2, DoubleWellModel(1.0), shape="linear")])
    with pytest.raises(TypeError):
        s.parameters_at(1.5)


def test_max_abs_covers_ramp():
    s = PotentialSchedule(GRID, [Segment(0, 1, LatticeParams(0, 10), shape="linear",
                                         start=LatticeParams(0, 0))])
    assert s.max_abs() == pytest.approx(10.0, rel=1e-3)


def test_delta_linearity_exact():
    omega_t = RB87.hz_to_natural(50.0)
    x = np.array([-39.0, -3.0, 1.0, 17.0])
    ratio = delta_from_position(x, omega_t) / x
    assert np.allclose(ratio, ratio[0], rtol=1e-14, atol=0)
    assert ratio[0] == pytest.approx(9.68e-4, rel=2e-3)


def test_timing_window_and_site_center():
    lo, hi = timing_window(2 * math.sqrt(35), 0.3)
    assert lo == pytest.approx(1 / (2 * math.sqrt(35)))
    assert hi == pytest.approx(1 / 0.3)
    assert timing_window(1.0, 0.0)[1] == math.inf
    assert lattice_site_center(0.0) == pytest.approx(1.0)
