import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from heliobubble.energy import (
    defect_energy,
    interaction_energy_p,
    interaction_energy_s,
    surface_energy,
    volume_energy,
    volume_kinetic_energy,
)
from heliobubble.potentials import Morse, PairPotentialSet, PotentialError, Tabulated, ZeroPotential
from heliobubble.profile import DensityProfileParams, equivalent_bubble_radius
from heliobubble.quadrature import QuadratureSpec

RHO0 = 0.0032518
ZERO = PairPotentialSet(ZeroPotential(), ZeroPotential(), ZeroPotential())


def test_volume_energy(consts):
    assert volume_energy(0.0, 10.0) == 0.0
    r_b = consts.angstrom_to_bohr(8.34)
    e = volume_energy(consts.bar_to_au(1.0), r_b)
    # (4 pi / 3) (8.34e-10 m)^3 1e5 Pa in eV
    assert consts.convert_energy(e, "hartree", "joule") == pytest.approx(2.4299e-22, rel=1e-4)
    assert consts.convert_energy(e, "hartree", "eV") == pytest.approx(1.5166e-3, rel=1e-4)
    assert volume_energy(2.0, 3.0) == pytest.approx(2 * volume_energy(1.0, 3.0), rel=1e-15)


def test_surface_energy(consts):
    assert surface_energy(1e-7, 0.0) == 0.0
    assert surface_energy(1e-7, 6.0) == pytest.approx(4 * surface_energy(1e-7, 3.0), rel=1e-15)
    e = surface_energy(consts.sigma_default, consts.angstrom_to_bohr(8.34))
    assert consts.convert_energy(e, "hartree", "joule") == pytest.approx(3.0587e-21, rel=1e-4)
    with pytest.raises(ValueError):
        surface_energy(-1.0, 1.0)


def test_kinetic_energy_vs_trapezoid(consts):
    for r0, alpha in ((15.0, 1.18), (4.0, 0.7), (0.5, 2.5)):
        got = volume_kinetic_energy(DensityProfileParams(r0, alpha, RHO0))
        ref = oracles.kinetic_trapezoid(r0, alpha, RHO0, consts.m_he)
        assert got.value == pytest.approx(ref, rel=1e-6)
        assert got.value > 0


def test_kinetic_energy_linear_in_rho0():
    a = volume_kinetic_energy(DensityProfileParams(9.0, 1.18, RHO0)).value
    b = volume_kinetic_energy(DensityProfileParams(9.0, 1.18, 2 * RHO0)).value
    assert b / a == pytest.approx(2.0, rel=1e-10)


def test_kinetic_energy_dimensional_collapse():
    base = volume_kinetic_energy(DensityProfileParams(9.0, 1.18, RHO0)).value
    for k in (0.5, 3.0):
        scaled = volume_kinetic_energy(DensityProfileParams(9.0 * k, 1.18 / k, RHO0)).value
        assert scaled / base == pytest.approx(k, rel=1e-9)


def test_interaction_zero_and_far_well():
    prof = DensityProfileParams(9.0, 1.18, RHO0)
    assert interaction_energy_s(ZeroPotential(), prof).value == 0.0
    m = Morse(1e-4, 8.0, 1.0)
    far = DensityProfileParams(8.0 + 20.0, 1.18, RHO0)
    assert abs(interaction_energy_s(m, far).value) < 1e-6 * 1e-4


def test_interaction_vs_scipy_quad():
    m = Morse(2e-4, 9.0, 0.8)
    for r0 in (5.0, 9.0, 13.0):
        got = interaction_energy_s(m, DensityProfileParams(r0, 1.18, RHO0)).value
        assert got == pytest.approx(oracles.interaction_quad(m, r0, 1.18, RHO0, m.long_range_cutoff), rel=1e-9)


def test_narrow_well_limit():
    # smooth sin^2 well of area -V0 * delta / 2 centred beyond the bubble edge
    r0, a, delta, v0 = 6.0, 9.0, 0.02, 1e-3
    bump = np.linspace(a, a + delta, 81)
    r = np.concatenate([np.linspace(r0 - 1.0, a - delta, 60)[:-1], np.linspace(a - delta, a, 41)[:-1],
                        bump, np.linspace(a + delta, a + 2 * delta, 41)[1:], np.linspace(a + 2 * delta, 20, 80)[1:]])
    v = np.where((r >= a) & (r <= a + delta), -v0 * np.sin(math.pi * (r - a) / delta) ** 2, 0.0)
    well = Tabulated(tuple(r), tuple(v))
    prof = DensityProfileParams(r0, 1.18, RHO0)
    got = interaction_energy_s(well, prof, QuadratureSpec(relative_tolerance=1e-10)).value
    rho = float(oracles.density(a + delta / 2, r0, 1.18, RHO0))
    limit = 4 * math.pi * (-v0) * (delta / 2) * rho * (a + delta / 2) ** 2
    assert got == pytest.approx(limit, rel=1e-3)


def test_tabulated_below_bubble_edge_rejected():
    r = np.linspace(8.0, 20.0, 20)
    tab = Tabulated(tuple(r), tuple(-1e-5 * np.exp(-(r - 8.0))))
    with pytest.raises(PotentialError, match="first tabulated node"):
        interaction_energy_s(tab, DensityProfileParams(6.0, 1.18, RHO0))
    assert interaction_energy_s(tab, DensityProfileParams(8.5, 1.18, RHO0)).value < 0


def test_p_state_weights():
    v = Morse(1e-4, 8.0, 0.9)
    prof = DensityProfileParams(7.0, 1.18, RHO0)
    iso = interaction_energy_p(v, v, prof).value
    assert iso == pytest.approx(interaction_energy_s(v, prof).value, rel=1e-12)
    pi_only = interaction_energy_p(ZeroPotential(), v, prof).value
    assert pi_only == pytest.approx(2.0 / 3.0 * iso, rel=1e-12)
    assert interaction_energy_p(v, v, prof, angular_prefactor="4pi").value == pytest.approx(2 * iso, rel=1e-14)
    with pytest.raises(ValueError):
        interaction_energy_p(v, v, prof, angular_prefactor="8pi")


def test_p_state_vs_angular_double_integral():
    vs, vp = Morse(1e-5, 12.0, 0.7), Morse(1e-4, 8.0, 0.9)
    prof = DensityProfileParams(8.0, 1.18, RHO0)
    upper = max(vs.long_range_cutoff, vp.long_range_cutoff)
    ref = oracles.interaction_p_angular(vs, vp, 8.0, 1.18, RHO0, upper)
    got = interaction_energy_p(vs, vp, prof, QuadratureSpec(relative_tolerance=1e-11)).value
    assert got == pytest.approx(ref, rel=1e-8)


def test_defect_energy_term_isolation(calibrated):
    prof = DensityProfileParams(9.0, 1.18, RHO0)
    b = defect_energy("S", ZERO, prof, 0.0, 0.0)
    assert b.e_defect == b.e_vk > 0
    assert b.e_vol == b.e_surf == b.e_int == 0.0
    with pytest.raises(ValueError):
        defect_energy("D", ZERO, prof, 0.0, 0.0)
    with pytest.raises(ValueError):
        defect_energy("S", ZERO, prof, 0.0, 0.0, terms=("vol", "magic"))


def test_zero_potential_energy_increases_with_radius(sigma_au, consts):
    p = consts.bar_to_au(5.0)
    e = [defect_energy("S", ZERO, DensityProfileParams(r0, 1.18, RHO0), p, sigma_au).e_defect
         for r0 in np.linspace(1.0, 30.0, 40)]
    assert np.all(np.diff(e) > 0)


def test_single_interior_minimum_s_state(calibrated, sigma_au, consts):
    p = consts.bar_to_au(2.0)
    r = np.linspace(consts.angstrom_to_bohr(2.0), consts.angstrom_to_bohr(15.0), 200)
    e = np.array([defect_energy("S", calibrated, DensityProfileParams(x, 1.18, RHO0), p, sigma_au).e_defect
                  for x in r])
    interior_minima = np.flatnonzero((e[1:-1] < e[:-2]) & (e[1:-1] < e[2:]))
    assert len(interior_minima) == 1
    assert e[0] > e.min() and e[-1] > e.min()


def test_quadrature_convergence(calibrated):
    prof = DensityProfileParams(8.5, 1.18, RHO0)
    loose, tight = QuadratureSpec(relative_tolerance=1e-6), QuadratureSpec(relative_tolerance=1e-7)
    pairs = [
        (volume_kinetic_energy(prof, loose), volume_kinetic_energy(prof, tight)),
        (interaction_energy_s(calibrated.v_s, prof, loose), interaction_energy_s(calibrated.v_s, prof, tight)),
        (interaction_energy_p(calibrated.v_p_sigma, calibrated.v_p_pi, prof, loose),
         interaction_energy_p(calibrated.v_p_sigma, calibrated.v_p_pi, prof, tight)),
    ]
    for a, b in pairs:
        assert abs(a.value - b.value) <= a.error


def random_profile():
    return st.builds(DensityProfileParams, st.floats(4.0, 25.0), st.floats(0.6, 3.0), st.floats(1e-3, 6e-3))


@given(random_profile(), st.floats(0.0, 25.0), st.floats(0.0, 25.0), st.sampled_from(["S", "P"]))
def test_pressure_linearity(prof, p1_bar, p2_bar, state):
    from heliobubble.constants import DEFAULT_CONSTANTS as c
    from heliobubble.potentials import CALIBRATED_POTENTIALS as pots
    sigma = c.sigma_default
    e1 = defect_energy(state, pots, prof, c.bar_to_au(p1_bar), sigma)
    e2 = defect_energy(state, pots, prof, c.bar_to_au(p2_bar), sigma)
    r_b = equivalent_bubble_radius(prof)
    expected = 4 * math.pi / 3 * r_b**3 * (c.bar_to_au(p2_bar) - c.bar_to_au(p1_bar))
    assert e2.e_defect - e1.e_defect == pytest.approx(expected, rel=1e-9, abs=1e-15 * abs(e1.e_defect))


@given(random_profile(), st.floats(0.0, 25.0))
def test_breakdown_additive_and_signed(prof, p_bar):
    from heliobubble.constants import DEFAULT_CONSTANTS as c
    from heliobubble.potentials import CALIBRATED_POTENTIALS as pots
    b = defect_energy("P", pots, prof, c.bar_to_au(p_bar), c.sigma_default)
    parts = b.e_vol + b.e_surf + b.e_vk + b.e_int
    assert b.e_defect == pytest.approx(parts, rel=1e-12, abs=1e-300)
    assert b.e_vol >= 0 and b.e_surf >= 0 and b.e_vk >= 0


@given(st.floats(1e-6, 1e-3), st.floats(4.0, 14.0), st.floats(0.4, 1.5), random_profile())
def test_isotropic_reduction(d_e, r_e, a, prof):
    v = Morse(d_e, r_e, a)
    s = interaction_energy_s(v, prof).value
    p = interaction_energy_p(v, v, prof).value
    assert p == pytest.approx(s, rel=1e-10, abs=1e-300)
