"""Physical constants and unit conversions.

The model core works in Hartree atomic units: energies in hartree, lengths
in bohr, pressures in hartree/bohr^3, number densities in bohr^-3. Values
at the I/O boundary are nm (wavelengths), bar (pressures), angstrom
(radii) and SI / CGS for surface tension and mass density.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

ENERGY_UNITS = ("hartree", "eV", "joule", "cm-1")


@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable constant set; override fields via ``dataclasses.replace``."""

    hartree_ev: float = 27.212
    bohr_angstrom: float = 0.529
    ev_joule: float = 1.602176634e-19
    hc_ev_nm: float = 1239.841984
    m_he_amu: float = 4.002602
    amu_electron_masses: float = 1822.888486
    amu_gram: float = 1.66053906660e-24
    rho0_g_cm3: float = 0.146
    sigma_j_m2: float = 3.5e-4

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            # surface tension may be switched off; every other constant scales a unit
            ok = value >= 0 if f.name == "sigma_j_m2" else value > 0
            if not ok:
                raise ValueError(f"constant {f.name} must be positive, got {value!r}")

    # -- derived, atomic units ------------------------------------------------
    @property
    def hbar(self) -> float:
        return 1.0

    @property
    def m_he(self) -> float:
        """Mass of a 4He atom in electron masses."""
        return self.m_he_amu * self.amu_electron_masses

    @property
    def hartree_joule(self) -> float:
        return self.hartree_ev * self.ev_joule

    @property
    def bohr_m(self) -> float:
        return self.bohr_angstrom * 1e-10

    @property
    def hc(self) -> float:
        """hc in hartree * nm."""
        return self.hc_ev_nm / self.hartree_ev

    @property
    def pressure_au_pa(self) -> float:
        return self.hartree_joule / self.bohr_m**3

    @property
    def bar(self) -> float:
        """One bar expressed in hartree / bohr^3."""
        return 1e5 / self.pressure_au_pa

    @property
    def sigma_default(self) -> float:
        """Default surface tension in hartree / bohr^2."""
        return self.surface_tension_to_au(self.sigma_j_m2)

    @property
    def rho0_default(self) -> float:
        """Default helium number density in bohr^-3."""
        return self.mass_density_to_number(self.rho0_g_cm3)

    # -- conversions ----------------------------------------------------------
    def angstrom_to_bohr(self, x):
        return x / self.bohr_angstrom

    def bohr_to_angstrom(self, x):
        return x * self.bohr_angstrom

    def bar_to_au(self, p):
        return p * self.bar

    def au_to_bar(self, p):
        return p / self.bar

    def surface_tension_to_au(self, sigma_j_m2):
        return sigma_j_m2 * self.bohr_m**2 / self.hartree_joule

    def mass_density_to_number(self, rho_g_cm3):
        """g/cm^3 -> atoms per bohr^3."""
        bohr_cm = self.bohr_angstrom * 1e-8
        return rho_g_cm3 / (self.m_he_amu * self.amu_gram) * bohr_cm**3

    def number_to_mass_density(self, n_au):
        bohr_cm = self.bohr_angstrom * 1e-8
        return n_au * (self.m_he_amu * self.amu_gram) / bohr_cm**3

    def _energy_scale(self, unit: str) -> float:
        # size of one `unit` in hartree
        if unit == "hartree":
            return 1.0
        if unit == "eV":
            return 1.0 / self.hartree_ev
        if unit == "joule":
            return 1.0 / self.hartree_joule
        if unit == "cm-1":
            # 1 cm^-1 = hc / (1 cm) = hc_ev_nm / 1e7 eV
            return self.hc_ev_nm / 1e7 / self.hartree_ev
        raise ValueError(f"unknown energy unit {unit!r}; expected one of {ENERGY_UNITS}")

    def convert_energy(self, value, from_unit: str, to_unit: str):
        return value * (self._energy_scale(from_unit) / self._energy_scale(to_unit))

    def wavelength_to_energy(self, wavelength_nm):
        """Photon energy (hartree) of a wavelength given in nm."""
        if wavelength_nm <= 0:
            raise ValueError(f"wavelength must be positive, got {wavelength_nm!r}")
        return self.hc / wavelength_nm

    def energy_to_wavelength(self, energy):
        """Wavelength (nm) of a photon with the given energy in hartree."""
        if energy <= 0:
            raise ValueError(f"photon energy must be positive, got {energy!r}")
        return self.hc / energy


DEFAULT_CONSTANTS = PhysicalConstants()


def convert_energy(value, from_unit: str, to_unit: str, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    return constants.convert_energy(value, from_unit, to_unit)


def wavelength_to_energy(wavelength_nm, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    return constants.wavelength_to_energy(wavelength_nm)


def energy_to_wavelength(energy, constants: PhysicalConstants = DEFAULT_CONSTANTS):
    return constants.energy_to_wavelength(energy)
