import math

import numpy as np
import pytest

import oracles
from heliobubble import equilibrium as eqm
from heliobubble.energy import defect_energy, interaction_energy_p, interaction_energy_s
from heliobubble.equilibrium import (
    DEFAULT_OPTIONS,
    DEFAULT_TRANSITIONS,
    ModelOptions,
    SearchError,
    emission_wavelength,
    find_equilibrium,
    line_wavelengths,
    pressure_scan,
)
from heliobubble.potentials import PairPotentialSet, ZeroPotential

ZERO = PairPotentialSet(ZeroPotential(), ZeroPotential(), ZeroPotential())


def test_zero_potentials_collapse_to_bracket_edge(consts, sigma_au):
    res = find_equilibrium("S", ZERO, consts.bar_to_au(5.0), sigma_au)
    assert res.at_boundary
    assert res.r0_star == res.bracket[0]


def test_svp_radius_of_calibrated_s_state(calibrated, consts, sigma_au):
    res = find_equilibrium("S", calibrated, consts.bar_to_au(2.9e-3), sigma_au)
    assert consts.bohr_to_angstrom(res.r0_star) == pytest.approx(8.34, rel=0.01)
    assert res.certificate and not res.at_boundary
    lo, hi = res.bracket
    assert lo < res.r0_star < hi


@pytest.mark.parametrize("state,p_bar", [("S", 2.0), ("P", 17.0)])
def test_minimizer_vs_grid_oracle(calibrated, consts, sigma_au, state, p_bar):
    p = consts.bar_to_au(p_bar)
    res = find_equilibrium(state, calibrated, p, sigma_au)
    lo, hi = res.bracket

    def energy(r0):
        return defect_energy(state, calibrated, DEFAULT_OPTIONS.profile(r0, p), p, sigma_au).e_defect

    x_grid, step = oracles.grid_minimum(energy, lo, hi, n=10_000)
    assert abs(res.r0_star - x_grid) <= step


def test_non_finite_energy_is_a_search_error(monkeypatch, calibrated, sigma_au):
    real = eqm.defect_energy

    def broken(*args, **kwargs):
        b = real(*args, **kwargs)
        return b.__class__(**{**b.__dict__, "e_defect": math.nan})

    monkeypatch.setattr(eqm, "defect_energy", broken)
    with pytest.raises(SearchError):
        find_equilibrium("S", calibrated, 0.0, sigma_au)


def test_invalid_bracket(calibrated, sigma_au):
    with pytest.raises(ValueError):
        find_equilibrium("S", calibrated, 0.0, sigma_au, bracket=(10.0, 5.0))


def test_free_atom_limit():
    em = emission_wavelength(ZERO, 0.0, 0.0, terms=("vol", "surf", "int"))
    assert em.wavelength == pytest.approx(517.27, abs=1e-9)


def test_calibrated_zero_pressure_line(calibrated, sigma_au):
    em = emission_wavelength(calibrated, 0.0, sigma_au)
    assert em.wavelength == pytest.approx(516.48, abs=0.1)
    # Franck-Condon: the lower state sits in the upper state's bubble
    assert em.lower_at_emission.profile == em.upper.breakdown.profile


def test_adiabatic_mode_differs(calibrated, sigma_au):
    fc = emission_wavelength(calibrated, 0.0, sigma_au, mode="franck_condon")
    ad = emission_wavelength(calibrated, 0.0, sigma_au, mode="adiabatic")
    assert ad.lower_at_emission is ad.lower.breakdown
    assert ad.wavelength != fc.wavelength
    with pytest.raises(ValueError):
        emission_wavelength(calibrated, 0.0, sigma_au, mode="vertical")


def test_blue_shift_over_pressure(calibrated, consts, sigma_au):
    lams = [emission_wavelength(calibrated, consts.bar_to_au(p), sigma_au).wavelength for p in (0, 5, 10, 15, 20, 25)]
    assert np.all(np.diff(lams) < 0)


def test_blue_shift_mechanism(calibrated, consts, sigma_au):
    # the emitting S state sees E_int(S) - E_int(P) grow as the bubble shrinks ...
    r0s = np.linspace(consts.angstrom_to_bohr(7.7), consts.angstrom_to_bohr(8.4), 8)
    gap = []
    for r0 in r0s:
        prof = DEFAULT_OPTIONS.profile(r0, 0.0)
        gap.append(interaction_energy_s(calibrated.v_s, prof).value
                   - interaction_energy_p(calibrated.v_p_sigma, calibrated.v_p_pi, prof).value)
    assert np.all(np.diff(gap) < 0)
    # ... and the line moves to shorter wavelength as pressure shrinks the bubble
    em = [emission_wavelength(calibrated, consts.bar_to_au(p), sigma_au) for p in (0.0, 12.0, 24.0)]
    assert em[0].upper.r0_star > em[1].upper.r0_star > em[2].upper.r0_star
    assert em[0].wavelength > em[1].wavelength > em[2].wavelength


def test_joint_alpha_mode(calibrated, consts, sigma_au):
    p = consts.bar_to_au(2.0)
    fixed = find_equilibrium("S", calibrated, p, sigma_au)
    joint = find_equilibrium("S", calibrated, p, sigma_au, options=ModelOptions(alpha_mode="joint"))
    assert joint.breakdown.e_defect <= fixed.breakdown.e_defect + 1e-15
    assert joint.alpha != DEFAULT_OPTIONS.alpha
    with pytest.raises(ValueError):
        ModelOptions(alpha_mode="free")


def test_rho0_table_interpolation(consts):
    opts = ModelOptions(rho0_table=((consts.bar_to_au(25.0), 0.004), (0.0, 0.003)))
    assert opts.rho0_at(consts.bar_to_au(12.5)) == pytest.approx(0.0035, rel=1e-12)
    assert opts.rho0_at(0.0) == 0.003


def test_line_wavelengths():
    assert line_wavelengths(517.27) == pytest.approx((516.73, 517.27, 518.36), abs=1e-12)
    p0, p1, p2 = line_wavelengths(516.48)
    assert p0 == pytest.approx(515.94, abs=1e-9) and p2 == pytest.approx(517.57, abs=1e-9)
    off = DEFAULT_TRANSITIONS.offsets
    assert off["P0"] == pytest.approx(-0.54, abs=0.01) and off["P2"] == pytest.approx(1.09, abs=0.01)
    with pytest.raises(ValueError):
        line_wavelengths(0.0)


def test_scan_offsets_constant_and_radii_shrink(calibrated, sigma_au):
    res = pressure_scan(calibrated, np.linspace(0, 24, 7), sigma_au)
    assert not res.errors and len(res.points) == 7
    d0 = [pt.wavelengths[0] - pt.wavelengths[1] for pt in res.points]
    assert np.ptp(d0) < 1e-12
    assert np.all(np.diff([pt.r0_s for pt in res.points]) < 0)
    assert np.all(np.diff([pt.r0_p for pt in res.points]) < 0)
    assert res.series["P1"].fit.slope < 0


def test_scan_single_point_and_validation(calibrated, sigma_au):
    res = pressure_scan(calibrated, [3.0], sigma_au)
    assert len(res.series["P1"].pressures) == 1 and res.series["P1"].fit is None
    for grid in ([], [2.0, 1.0], [-1.0, 1.0], [1.0, 30.0]):
        with pytest.raises(ValueError):
            pressure_scan(calibrated, grid, sigma_au)


def test_scan_records_point_failures(monkeypatch, calibrated, sigma_au, consts):
    real = eqm.emission_wavelength

    def flaky(potentials, p, *args, **kwargs):
        if consts.au_to_bar(p) > 10:
            raise SearchError("synthetic failure")
        return real(potentials, p, *args, **kwargs)

    monkeypatch.setattr(eqm, "emission_wavelength", flaky)
    res = pressure_scan(calibrated, [0.0, 5.0, 10.0, 15.0, 20.0], sigma_au)
    assert [pt.pressure_bar for pt in res.points] == [0.0, 5.0, 10.0]
    assert [p for p, _ in res.errors] == [15.0, 20.0]
    assert "synthetic failure" in res.errors[0][1]


def test_parallel_scan_matches_serial(calibrated, sigma_au):
    grid = [0.0, 8.0, 16.0, 24.0]
    a = pressure_scan(calibrated, grid, sigma_au, workers=1)
    b = pressure_scan(calibrated, grid, sigma_au, workers=2)
    assert [pt.wavelengths for pt in a.points] == [pt.wavelengths for pt in b.points]
