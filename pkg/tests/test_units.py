import math

import pytest

from dqnl.units import E_R, HBAR, K, MASS, RB87, UnitSystem, harmonic_frequency, oscillator_length


def test_recoil_energy_identity():
    assert HBAR**2 * K**2 / (2 * MASS) == pytest.approx(E_R, rel=1e-15)


def test_rb87_scales():
    # E_r / h for 87Rb at 800 nm is about 3.57 kHz
    assert RB87.recoil_energy_j / (2 * math.pi * 1.054571817e-34) == pytest.approx(3571, rel=2e-3)
    assert RB87.length_m == pytest.approx(400e-9)


def test_frequency_round_trip():
    assert RB87.angular_frequency_to_si(RB87.hz_to_natural(50.0)) == pytest.approx(2 * math.pi * 50)


def test_lattice_trap_frequency_and_size():
    omega = harmonic_frequency(35.0)
    assert omega == pytest.approx(2 * math.sqrt(35))
    assert oscillator_length(omega) == pytest.approx(0.1309, abs=1e-4)


@pytest.mark.parametrize("bad", [dict(mass_kg=0), dict(wavelength_m=-1)])
def test_unit_system_validation(bad):
    with pytest.raises(ValueError):
        UnitSystem(**bad)


def test_negative_inputs_rejected():
    with pytest.raises(ValueError):
        harmonic_frequency(-1)
    with pytest.raises(ValueError):
        oscillator_length(0)
