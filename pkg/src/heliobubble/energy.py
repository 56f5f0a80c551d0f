"""Defect energy of an impurity in a helium bubble.

    E_defect = E_vol + E_surf + E_vk + E_int

All quantities in Hartree atomic units (see ``constants``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .constants import DEFAULT_CONSTANTS, PhysicalConstants
from .potentials import PairPotentialSet, PotentialCurve, PotentialError, pack_terms
from .profile import DensityProfileParams, equivalent_bubble_radius, kinetic_integrand_limit
from .quadrature import (
    DEFAULT_QUADRATURE,
    MODE_INTERACTION,
    MODE_KINETIC,
    Integral,
    QuadratureSpec,
    radial_integral,
)

logger = logging.getLogger(__name__)

STATES = ("S", "P")
TERMS = ("vol", "surf", "vk", "int")
# azimuthal prefactor of the p-state angular integral: 2pi makes the
# isotropic case identical to the s-state formula, 4pi doubles it
ANGULAR_PREFACTORS = ("2pi", "4pi")


@dataclass(frozen=True)
class EnergyBreakdown:
    e_vol: float
    e_surf: float
    e_vk: float
    e_int: float
    e_defect: float
    pressure: float
    profile: DensityProfileParams
    state: str
    r_b: float
    quadrature_error: float = 0.0


def volume_energy(p, r_b):
    if r_b < 0:
        raise ValueError("bubble radius must be >= 0")
    return 4.0 * math.pi / 3.0 * p * r_b**3


def surface_energy(sigma, r_b):
    if sigma < 0 or r_b < 0:
        raise ValueError("surface tension and bubble radius must be >= 0")
    return 4.0 * math.pi * sigma * r_b**2


def _upper_limit(profile, quad, curves=()):
    upper = profile.r0 + quad.truncation_widths / profile.alpha
    for curve in curves:
        upper = max(upper, curve.long_range_cutoff)
    return upper


def volume_kinetic_energy(profile: DensityProfileParams, quad: QuadratureSpec = DEFAULT_QUADRATURE,
                          constants: PhysicalConstants = DEFAULT_CONSTANTS) -> Integral:
    """hbar^2 / (8 m_He) * integral of (grad rho)^2 / rho over space."""
    upper = _upper_limit(profile, quad)
    res = radial_integral(MODE_KINETIC, profile.r0, profile.alpha, profile.rho0, upper, quad)
    scale = 4.0 * math.pi * constants.hbar**2 / (8.0 * constants.m_he)
    tail = profile.rho0 * profile.alpha**2 * _kinetic_tail(quad.truncation_widths) * upper**2
    peak = kinetic_integrand_limit(profile) * profile.r0**2 if profile.r0 > 0 else 0.0
    if peak and tail > 1e-12 * peak:
        logger.warning("kinetic integrand at truncation is %.3g of its peak", tail / peak)
    return Integral(scale * res.value, scale * res.error, res.evaluations)


def _kinetic_tail(s):
    return s * s * math.exp(-2.0 * s) / (1.0 - (1.0 + s) * math.exp(-s))


def _interaction(weighted, profile, quad, prefactor):
    curves = [c for c, w in weighted if w != 0.0]
    if not curves:
        return Integral(0.0, 0.0, 0)
    first_nodes = [c.r[0] for c in curves if hasattr(c, "r")]
    if first_nodes and profile.r0 < max(first_nodes):
        # the integrand vanishes inside the void; anything beyond R0 needs tabulated support
        raise PotentialError(
            f"bubble edge R0 = {profile.r0:.6g} bohr lies below the first tabulated node "
            f"{max(first_nodes):.6g} bohr")
    terms, knots, coefs = pack_terms(weighted)
    upper = _upper_limit(profile, quad, curves)
    res = radial_integral(MODE_INTERACTION, profile.r0, profile.alpha, profile.rho0, upper, quad,
                          terms, knots, coefs)
    return Integral(prefactor * res.value, abs(prefactor) * res.error, res.evaluations)


def interaction_energy_s(v_s: PotentialCurve, profile: DensityProfileParams,
                         quad: QuadratureSpec = DEFAULT_QUADRATURE) -> Integral:
    """4 pi * integral of V_S(r) rho(r) r^2 dr."""
    return _interaction([(v_s, 1.0)], profile, quad, 4.0 * math.pi)


def interaction_energy_p(v_p_sigma: PotentialCurve, v_p_pi: PotentialCurve,
                         profile: DensityProfileParams, quad: QuadratureSpec = DEFAULT_QUADRATURE,
                         angular_prefactor: str = "2pi") -> Integral:
    """P-state interaction with the angular integral done analytically.

    With the 2pi azimuthal prefactor the result is
    (4 pi / 3) * integral of [V_sigma + 2 V_pi] rho r^2 dr.
    """
    if angular_prefactor not in ANGULAR_PREFACTORS:
        raise ValueError(f"angular_prefactor must be one of {ANGULAR_PREFACTORS}")
    scale = 4.0 * math.pi / 3.0 * (2.0 if angular_prefactor == "4pi" else 1.0)
    return _interaction([(v_p_sigma, 1.0), (v_p_pi, 2.0)], profile, quad, scale)


def defect_energy(state: str, potentials: PairPotentialSet, profile: DensityProfileParams, p: float,
                  sigma: float, quad: QuadratureSpec = DEFAULT_QUADRATURE, *,
                  radius_mode: str = "equal_volume", angular_prefactor: str = "2pi",
                  terms=TERMS, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> EnergyBreakdown:
    """Assemble all defect-energy terms for one state at one configuration.

    ``terms`` selects which contributions are included (the rest are zero);
    it exists for isolating terms in tests and sensitivity studies.
    """
    if state not in STATES:
        raise ValueError(f"state must be one of {STATES}, got {state!r}")
    unknown = set(terms) - set(TERMS)
    if unknown:
        raise ValueError(f"unknown energy terms {sorted(unknown)}")
    r_b = equivalent_bubble_radius(profile, radius_mode)
    e_vol = volume_energy(p, r_b) if "vol" in terms else 0.0
    e_surf = surface_energy(sigma, r_b) if "surf" in terms else 0.0
    err = 0.0
    e_vk = 0.0
    if "vk" in terms:
        vk = volume_kinetic_energy(profile, quad, constants)
        e_vk, err = vk.value, err + vk.error
    e_int = 0.0
    if "int" in terms:
        if state == "S":
            res = interaction_energy_s(potentials.v_s, profile, quad)
        else:
            res = interaction_energy_p(potentials.v_p_sigma, potentials.v_p_pi, profile, quad,
                                       angular_prefactor)
        e_int, err = res.value, err + res.error
    return EnergyBreakdown(
        e_vol=e_vol, e_surf=e_surf, e_vk=e_vk, e_int=e_int,
        e_defect=e_vol + e_surf + e_vk + e_int,
        pressure=p, profile=profile, state=state, r_b=r_b, quadrature_error=err,
    )
