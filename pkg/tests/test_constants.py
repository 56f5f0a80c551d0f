import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heliobubble.constants import (
    DEFAULT_CONSTANTS,
    ENERGY_UNITS,
    PhysicalConstants,
    convert_energy,
    energy_to_wavelength,
    wavelength_to_energy,
)


def test_hartree_in_ev():
    assert convert_energy(1.0, "hartree", "eV") == pytest.approx(27.212, rel=1e-15)
    assert convert_energy(27.212, "eV", "hartree") == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("a", ENERGY_UNITS)
@pytest.mark.parametrize("b", ENERGY_UNITS)
def test_zero_maps_to_zero(a, b):
    assert convert_energy(0.0, a, b) == 0.0


def test_unknown_unit_rejected():
    with pytest.raises(ValueError, match="kcal"):
        convert_energy(1.0, "kcal", "eV")


def test_constants_positive_and_validated():
    c = DEFAULT_CONSTANTS
    for value in (c.hbar, c.m_he, c.hc, c.bar, c.sigma_default, c.rho0_default, c.bohr_m):
        assert value > 0
    with pytest.raises(ValueError):
        PhysicalConstants(hartree_ev=-1.0)


def test_derived_unit_values(consts):
    # 1 bar in hartree/bohr^3 from 27.212 eV and 0.529 angstrom
    eh = 27.212 * 1.602176634e-19
    a0 = 0.529e-10
    assert consts.bar == pytest.approx(1e5 * a0**3 / eh, rel=1e-14)
    assert consts.sigma_default == pytest.approx(3.5e-4 * a0**2 / eh, rel=1e-14)
    n = 0.146 / (4.002602 * 1.66053906660e-24) * (0.529e-8) ** 3
    assert consts.rho0_default == pytest.approx(n, rel=1e-14)
    assert consts.m_he == pytest.approx(4.002602 * 1822.888486, rel=1e-15)


def test_wavelength_round_trip():
    e = wavelength_to_energy(517.27)
    assert energy_to_wavelength(e) == pytest.approx(517.27, rel=1e-14)
    assert energy_to_wavelength(2 * e) == pytest.approx(517.27 / 2, rel=1e-14)


def test_blue_target_has_higher_energy():
    assert wavelength_to_energy(516.48) - wavelength_to_energy(517.27) > 0


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_non_positive_wavelength_rejected(bad):
    with pytest.raises(ValueError):
        wavelength_to_energy(bad)
    with pytest.raises(ValueError):
        energy_to_wavelength(bad)


@given(st.floats(1e-30, 1e30), st.sampled_from(ENERGY_UNITS), st.sampled_from(ENERGY_UNITS))
def test_conversion_round_trip(value, a, b):
    back = convert_energy(convert_energy(value, a, b), b, a)
    assert back == pytest.approx(value, rel=1e-12)


@given(st.floats(1.0, 1e5))
def test_lambda_times_energy_is_hc(lam):
    c = DEFAULT_CONSTANTS
    assert lam * wavelength_to_energy(lam) == pytest.approx(c.hc, rel=1e-15)
    assert energy_to_wavelength(wavelength_to_energy(lam)) == pytest.approx(lam, rel=1e-12)


@given(st.floats(1e-3, 1e3))
def test_length_and_pressure_round_trip(x):
    c = DEFAULT_CONSTANTS
    assert c.bohr_to_angstrom(c.angstrom_to_bohr(x)) == pytest.approx(x, rel=1e-12)
    assert c.au_to_bar(c.bar_to_au(x)) == pytest.approx(x, rel=1e-12)
    assert c.number_to_mass_density(c.mass_density_to_number(x)) == pytest.approx(x, rel=1e-12)
    assert math.isfinite(c.surface_tension_to_au(x))
