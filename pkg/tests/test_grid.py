import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqnl.grid import (
    ComplexField,
    SpatialGrid,
    forward_dft,
    gaussian,
    inverse_dft,
    make_grid,
    translate,
)
from dqnl.units import HBAR

from .conftest import random_state


def direct_dft(values):
    """O(N^2) unitary DFT by explicit summation."""
    n = len(values)
    k = np.arange(n)
    w = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return w @ values / math.sqrt(n)


@pytest.mark.parametrize("n, lo, hi", [(1, 0, 1), (2.5, 0, 1), (8, 1, 1), (8, 2, 1), (8, 0, np.inf)])
def test_grid_rejects_bad_arguments(n, lo, hi):
    with pytest.raises(ValueError):
        SpatialGrid(n, lo, hi)


def test_grid_spacing_and_momenta():
    g = make_grid(64, -2, 2)
    assert g.dx == pytest.approx(4 / 64)
    assert g.dp == pytest.approx(2 * np.pi * HBAR / 4)
    assert g.x[0] == -2 and g.x[-1] == pytest.approx(2 - g.dx)
    assert g.p[0] == 0
    assert np.all(np.diff(np.sort(g.p)) == pytest.approx(g.dp))
    with pytest.raises(ValueError):
        g.x[0] = 1.0


def test_field_shape_and_space_checked():
    g = SpatialGrid(16, 0, 1)
    with pytest.raises(ValueError):
        ComplexField(g, np.zeros(15))
    with pytest.raises(ValueError):
        ComplexField(g, np.zeros(16), space="k")


def test_inner_rejects_grid_mismatch():
    a = gaussian(SpatialGrid(32, -1, 1), 0, 0.2)
    b = gaussian(SpatialGrid(32, -1, 1.5), 0, 0.2)
    with pytest.raises(ValueError):
        a.inner(b)


def test_dft_matches_direct_summation(rng):
    g = SpatialGrid(48, -1, 1)
    f = random_state(g, rng)
    assert np.allclose(forward_dft(f).values, direct_dft(f.values), atol=1e-13)


def test_dft_roundtrip_and_parseval(rng):
    f = random_state(SpatialGrid(256, -2, 2), rng)
    fp = forward_dft(f)
    assert np.max(np.abs(inverse_dft(fp).values - f.values)) < 1e-12
    assert np.sum(np.abs(fp.values) ** 2) == pytest.approx(np.sum(np.abs(f.values) ** 2), rel=1e-13)


def test_dft_direction_checked():
    f = gaussian(SpatialGrid(16, -1, 1), 0, 0.3)
    with pytest.raises(ValueError):
        inverse_dft(f)
    with pytest.raises(ValueError):
        forward_dft(forward_dft(f))


def test_gaussian_is_normalized():
    g = SpatialGrid(256, -3, 3)
    assert gaussian(g, 0.2, 0.3).norm2() == pytest.approx(1.0, abs=1e-12)


def test_translate_moves_gaussian_by_non_grid_shift():
    g = SpatialGrid(256, -3, 3)
    shift = 0.3 * g.dx + 0.41
    moved = translate(gaussian(g, 0.5, 0.2), shift)
    # psi(x + s) is centred at c - s
    assert np.max(np.abs(moved.values - gaussian(g, 0.5 - shift, 0.2).values)) < 1e-12


def test_translate_zero_is_identity(rng):
    f = random_state(SpatialGrid(64, -1, 1), rng)
    assert np.array_equal(translate(f, 0.0).values, f.values)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(-2, 2), b=st.floats(-2, 2), seed=st.integers(0, 2**32 - 1))
def test_translate_composition_and_unitarity(a, b, seed):
    g = SpatialGrid(128, -2, 2)
    f = random_state(g, np.random.default_rng(seed))
    ab = translate(translate(f, a), b)
    assert np.max(np.abs(ab.values - translate(f, a + b).values)) < 1e-12
    assert abs(translate(f, a).norm2() - 1.0) < 1e-12
    assert np.max(np.abs(translate(translate(f, a), -a).values - f.values)) < 1e-12
