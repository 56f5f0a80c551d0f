"""Equilibrium bubble radii and predicted emission wavelengths.

Core functions take pressures in hartree/bohr^3; ``pressure_scan`` and the
line tables work at the I/O boundary in bar and nm.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .constants import DEFAULT_CONSTANTS, PhysicalConstants
from .energy import TERMS, EnergyBreakdown, defect_energy
from .potentials import PairPotentialSet
from .profile import DensityProfileParams
from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec
from .stats import LinearFit, linear_fit

logger = logging.getLogger(__name__)

LINES = ("P0", "P1", "P2")
EMISSION_MODES = ("franck_condon", "adiabatic")
ALPHA_MODES = ("fixed", "joint")
MAX_SCAN_PRESSURE_BAR = 25.0


class SearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelOptions:
    """Settings of the bubble model beyond sigma and quadrature.

    ``rho0`` is the bulk number density in bohr^-3. ``rho0_table`` holds
    optional (pressure [hartree/bohr^3], rho0) pairs interpolated linearly.
    """

    alpha: float = 1.18
    rho0: float = DEFAULT_CONSTANTS.rho0_default
    rho0_table: tuple = ()
    radius_mode: str = "equal_volume"
    angular_prefactor: str = "2pi"
    alpha_mode: str = "fixed"
    constants: PhysicalConstants = DEFAULT_CONSTANTS

    def __post_init__(self):
        if self.alpha_mode not in ALPHA_MODES:
            raise ValueError(f"alpha_mode must be one of {ALPHA_MODES}")
        if self.rho0_table:
            table = tuple(sorted((float(p), float(r)) for p, r in self.rho0_table))
            if any(r <= 0 for _, r in table):
                raise ValueError("rho0 table densities must be positive")
            object.__setattr__(self, "rho0_table", table)

    def rho0_at(self, p: float) -> float:
        if not self.rho0_table:
            return self.rho0
        ps, rs = zip(*self.rho0_table)
        return float(np.interp(p, ps, rs))

    def profile(self, r0: float, p: float, alpha: float | None = None) -> DensityProfileParams:
        return DensityProfileParams(r0, self.alpha if alpha is None else alpha, self.rho0_at(p))

    def default_bracket(self):
        c = self.constants
        return (c.angstrom_to_bohr(2.0), c.angstrom_to_bohr(15.0))


DEFAULT_OPTIONS = ModelOptions()


@dataclass(frozen=True)
class EquilibriumResult:
    state: str
    pressure: float
    r0_star: float
    r_b_star: float
    alpha: float
    breakdown: EnergyBreakdown
    bracket: tuple
    at_boundary: bool
    certificate: bool
    evaluations: int = 0

    @property
    def energy(self) -> float:
        return self.breakdown.e_defect


def _energy_fn(state, potentials, p, sigma, quad, options, terms):
    def energy(r0, alpha=None):
        b = defect_energy(state, potentials, options.profile(r0, p, alpha), p, sigma, quad,
                          radius_mode=options.radius_mode, angular_prefactor=options.angular_prefactor,
                          terms=terms, constants=options.constants)
        if not math.isfinite(b.e_defect):
            raise SearchError(f"non-finite defect energy at R0 = {r0!r} bohr")
        return b
    return energy


def find_equilibrium(state: str, potentials: PairPotentialSet, p: float, sigma: float,
                     quad: QuadratureSpec = DEFAULT_QUADRATURE, bracket=None,
                     options: ModelOptions = DEFAULT_OPTIONS, *, xtol: float | None = None,
                     grid_points: int = 41, terms=TERMS) -> EquilibriumResult:
    """Minimize the defect energy over R0 inside ``bracket`` (bohr).

    A coarse scan picks the lowest grid cell, then a bounded Brent search
    (golden section with parabolic steps) refines it to ``xtol`` (default
    1e-4 angstrom). A minimum on the bracket edge is flagged, not hidden.
    """
    lo, hi = bracket if bracket is not None else options.default_bracket()
    if not 0 < lo < hi:
        raise ValueError(f"invalid bracket {(lo, hi)!r}")
    if xtol is None:
        xtol = options.constants.angstrom_to_bohr(1e-4)
    energy = _energy_fn(state, potentials, p, sigma, quad, options, terms)
    calls = 0

    def f(r0):
        nonlocal calls
        calls += 1
        return energy(r0).e_defect

    grid = np.linspace(lo, hi, grid_points)
    values = np.array([f(x) for x in grid])
    i = int(np.argmin(values))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid_points - 1)]
    res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": xtol / 2})
    x, fx = float(res.x), float(res.fun)
    if values[i] < fx:
        x, fx = float(grid[i]), float(values[i])
    at_boundary = False
    if i == 0 and x - lo < 2 * xtol:
        x, at_boundary = lo, True
    elif i == grid_points - 1 and hi - x < 2 * xtol:
        x, at_boundary = hi, True

    alpha = options.alpha
    if options.alpha_mode == "joint" and not at_boundary:
        x, alpha = _joint_minimize(energy, x, alpha, lo, hi, xtol)

    best = energy(x, alpha)
    delta = 1e-3 * x
    neighbours = [energy(r, alpha).e_defect for r in (x - delta, x + delta) if lo <= r <= hi]
    certificate = all(e >= best.e_defect for e in neighbours)
    if at_boundary:
        logger.info("state %s at p=%.4g: minimum on bracket edge %.4g bohr", state, p, x)
    return EquilibriumResult(
        state=state, pressure=p, r0_star=x, r_b_star=best.r_b, alpha=alpha, breakdown=best,
        bracket=(lo, hi), at_boundary=at_boundary, certificate=certificate, evaluations=calls + 3,
    )


def _joint_minimize(energy, r0, alpha, lo, hi, xtol):
    def g(v):
        r, la = v
        if not lo <= r <= hi:
            return math.inf
        return energy(r, math.exp(la)).e_defect
    res = minimize(g, [r0, math.log(alpha)], method="Nelder-Mead",
                   options={"xatol": xtol / 2, "fatol": 1e-16, "maxiter": 2000})
    return float(res.x[0]), float(math.exp(res.x[1]))


@dataclass(frozen=True)
class TransitionTable:
    """Free-atom wavelengths (nm) of 3s4s 3S1 -> 3s3p 3P_J."""

    free_wavelengths: tuple = (("P0", 516.73), ("P1", 517.27), ("P2", 518.36))

    def free(self, line: str) -> float:
        return dict(self.free_wavelengths)[line]

    @property
    def offsets(self) -> dict:
        ref = self.free("P1")
        return {line: lam - ref for line, lam in self.free_wavelengths}


DEFAULT_TRANSITIONS = TransitionTable()


def line_wavelengths(lambda_p1: float, table: TransitionTable = DEFAULT_TRANSITIONS):
    """(lambda_P0, lambda_P1, lambda_P2) from the predicted 3P1 line."""
    if not lambda_p1 > 0:
        raise ValueError("wavelength must be positive")
    off = table.offsets
    return (lambda_p1 + off["P0"], lambda_p1, lambda_p1 + off["P2"])


class Emission(NamedTuple):
    wavelength: float
    upper: EquilibriumResult
    lower: EquilibriumResult
    delta_energy: float
    lower_at_emission: EnergyBreakdown


def emission_wavelength(potentials: PairPotentialSet, p: float, sigma: float,
                        quad: QuadratureSpec = DEFAULT_QUADRATURE, mode: str = "franck_condon",
                        options: ModelOptions = DEFAULT_OPTIONS,
                        table: TransitionTable = DEFAULT_TRANSITIONS, *, bracket=None,
                        terms=TERMS, xtol: float | None = None) -> Emission:
    """Predicted 3S1 -> 3P1 wavelength (nm) at pressure ``p``.

    franck_condon: the lower state is evaluated in the bubble of the relaxed
    upper state. adiabatic: each state at its own equilibrium.
    """
    if mode not in EMISSION_MODES:
        raise ValueError(f"mode must be one of {EMISSION_MODES}")
    upper = find_equilibrium("S", potentials, p, sigma, quad, bracket, options, terms=terms, xtol=xtol)
    lower = find_equilibrium("P", potentials, p, sigma, quad, bracket, options, terms=terms, xtol=xtol)
    if mode == "franck_condon":
        prof = upper.breakdown.profile
        lower_at = defect_energy("P", potentials, prof, p, sigma, quad,
                                 radius_mode=options.radius_mode,
                                 angular_prefactor=options.angular_prefactor,
                                 terms=terms, constants=options.constants)
    else:
        lower_at = lower.breakdown
    delta = upper.breakdown.e_defect - lower_at.e_defect
    c = options.constants
    photon = c.wavelength_to_energy(table.free("P1")) + delta
    return Emission(c.energy_to_wavelength(photon), upper, lower, delta, lower_at)


@dataclass(frozen=True)
class LineSeries:
    line: str
    pressures: tuple
    wavelengths: tuple
    sigmas: tuple | None = None
    fit: LinearFit | None = None

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.pressures, self.pressures[1:])):
            raise ValueError("pressures must be strictly increasing")
        if any(not lam > 0 for lam in self.wavelengths):
            raise ValueError("wavelengths must be positive")

    def with_fit(self):
        if len(self.pressures) < 3:
            return self
        return replace(self, fit=linear_fit(self.pressures, self.wavelengths, self.sigmas))

    def to_dict(self):
        return {"line": self.line, "pressures_bar": list(self.pressures),
                "wavelengths_nm": list(self.wavelengths),
                "sigmas_nm": list(self.sigmas) if self.sigmas is not None else None,
                "fit": self.fit.to_dict() if self.fit is not None else None}


@dataclass(frozen=True)
class ScanPoint:
    pressure_bar: float
    wavelengths: tuple
    r0_s: float
    r0_p: float
    emission: Emission


@dataclass(frozen=True)
class ScanResult:
    points: tuple
    series: dict
    errors: tuple = field(default=())


def _scan_point(args):
    potentials, p_bar, sigma, quad, mode, options, table = args
    try:
        em = emission_wavelength(potentials, options.constants.bar_to_au(p_bar), sigma, quad,
                                 mode, options, table)
    except Exception as exc:  # recorded per point; the scan carries on
        return p_bar, None, f"{type(exc).__name__}: {exc}"
    return p_bar, em, None


def pressure_scan(potentials: PairPotentialSet, pressures_bar, sigma: float,
                  quad: QuadratureSpec = DEFAULT_QUADRATURE, mode: str = "franck_condon",
                  options: ModelOptions = DEFAULT_OPTIONS, table: TransitionTable = DEFAULT_TRANSITIONS,
                  *, workers: int = 1) -> ScanResult:
    """Equilibria and three-line wavelengths over a pressure grid (bar)."""
    grid = [float(p) for p in pressures_bar]
    if not grid:
        raise ValueError("pressure grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("pressure grid must be strictly increasing")
    if grid[0] < 0 or grid[-1] > MAX_SCAN_PRESSURE_BAR:
        raise ValueError(f"pressures must lie within [0, {MAX_SCAN_PRESSURE_BAR}] bar")
    jobs = [(potentials, p, sigma, quad, mode, options, table) for p in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_scan_point, jobs))
    else:
        outcomes = [_scan_point(j) for j in jobs]

    points, errors = [], []
    for p_bar, em, err in outcomes:
        if em is None:
            errors.append((p_bar, err))
            continue
        lams = line_wavelengths(em.wavelength, table)
        c = options.constants
        points.append(ScanPoint(p_bar, lams, c.bohr_to_angstrom(em.upper.r0_star),
                                c.bohr_to_angstrom(em.lower.r0_star), em))
    series = {}
    for k, line in enumerate(LINES):
        s = LineSeries(line, tuple(pt.pressure_bar for pt in points),
                       tuple(pt.wavelengths[k] for pt in points))
        series[line] = s.with_fit()
    return ScanResult(tuple(points), series, tuple(errors))
