"""Calibrate model Morse potentials to target radii and zero-pressure line.

Three free parameters are adjusted: the S-state equilibrium distance and
range parameter (r_e, a), and a common shift of the two P-state r_e values.
Targets are the S and P equilibrium radii R0* at saturated vapour pressure
and the zero-pressure 3S1 -> 3P1 wavelength.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .equilibrium import (
    DEFAULT_OPTIONS,
    DEFAULT_TRANSITIONS,
    ModelOptions,
    TransitionTable,
    emission_wavelength,
    find_equilibrium,
)
from .potentials import Morse, PairPotentialSet
from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec

logger = logging.getLogger(__name__)

SVP_BAR = 2.9e-3
FREE_PARAMETERS = ("v_s.r_e", "v_s.a", "p.r_e_shift")
# normalisation of the residuals: success means every |residual| <= 1
RADIUS_TOLERANCE = 0.01  # relative
WAVELENGTH_TOLERANCE = 0.1  # nm
# tighter than the default search tolerance so the objective is smooth
CALIBRATION_XTOL = 1e-7  # bohr


class CalibrationError(RuntimeError):
    def __init__(self, message, residuals=None, potentials=None):
        super().__init__(message)
        self.residuals = residuals
        self.potentials = potentials


@dataclass(frozen=True)
class CalibrationTargets:
    r_eq_s: float = 8.34  # angstrom
    r_eq_p: float = 4.85  # angstrom
    lambda0: float = 516.48  # nm
    svp_bar: float = SVP_BAR


@dataclass(frozen=True)
class ModelOutputs:
    r_eq_s: float  # angstrom
    r_eq_p: float  # angstrom
    lambda0: float  # nm


@dataclass(frozen=True)
class CalibrationResult:
    potentials: PairPotentialSet
    outputs: ModelOutputs
    residuals: tuple
    parameters: tuple
    evaluations: int


def model_outputs(potentials: PairPotentialSet, sigma: float, quad: QuadratureSpec = DEFAULT_QUADRATURE,
                  options: ModelOptions = DEFAULT_OPTIONS, table: TransitionTable = DEFAULT_TRANSITIONS,
                  mode: str = "franck_condon", svp_bar: float = SVP_BAR, xtol: float | None = None):
    c = options.constants
    p_svp = c.bar_to_au(svp_bar)
    eq_s = find_equilibrium("S", potentials, p_svp, sigma, quad, None, options, xtol=xtol)
    eq_p = find_equilibrium("P", potentials, p_svp, sigma, quad, None, options, xtol=xtol)
    if eq_s.at_boundary or eq_p.at_boundary:
        raise CalibrationError("equilibrium on the search-bracket edge")
    em = emission_wavelength(potentials, 0.0, sigma, quad, mode, options, table, xtol=xtol)
    return ModelOutputs(c.bohr_to_angstrom(eq_s.r0_star), c.bohr_to_angstrom(eq_p.r0_star), em.wavelength)


def _residuals(out: ModelOutputs, targets: CalibrationTargets):
    return (
        (out.r_eq_s / targets.r_eq_s - 1.0) / RADIUS_TOLERANCE,
        (out.r_eq_p / targets.r_eq_p - 1.0) / RADIUS_TOLERANCE,
        (out.lambda0 - targets.lambda0) / WAVELENGTH_TOLERANCE,
    )


def _check_template(template: PairPotentialSet):
    for name in ("v_s", "v_p_sigma", "v_p_pi"):
        if not isinstance(getattr(template, name), Morse):
            raise CalibrationError(f"calibration needs Morse templates; {name} is "
                                   f"{type(getattr(template, name)).__name__}")


def template_parameters(template: PairPotentialSet):
    _check_template(template)
    return (template.v_s.r_e, template.v_s.a, 0.0)


def apply_parameters(template: PairPotentialSet, params) -> PairPotentialSet:
    r_e_s, a_s, shift = (float(x) for x in params)
    return PairPotentialSet(
        v_s=replace(template.v_s, r_e=r_e_s, a=a_s),
        v_p_sigma=replace(template.v_p_sigma, r_e=template.v_p_sigma.r_e + shift),
        v_p_pi=replace(template.v_p_pi, r_e=template.v_p_pi.r_e + shift),
    )


def calibrate_model_potentials(targets: CalibrationTargets, template: PairPotentialSet, sigma: float,
                               quad: QuadratureSpec = DEFAULT_QUADRATURE,
                               options: ModelOptions = DEFAULT_OPTIONS,
                               table: TransitionTable = DEFAULT_TRANSITIONS,
                               mode: str = "franck_condon", *, maxiter: int = 2000) -> CalibrationResult:
    """Nelder-Mead minimization of the squared normalised target residuals.

    The template's S-state (r_e, a) and a shared shift of the P-state r_e
    values are free; everything else is held. Raises ``CalibrationError``
    carrying the best residuals when any target misses its tolerance
    (1 % in radius, 0.1 nm in wavelength).
    """
    _check_template(template)
    if not (targets.r_eq_s > 0 and targets.r_eq_p > 0 and targets.lambda0 > 0):
        raise ValueError("calibration targets must be positive")
    if targets.r_eq_p >= targets.r_eq_s:
        # the S-state wall is the outer one in every template we calibrate
        raise CalibrationError(
            f"infeasible targets: P-state radius {targets.r_eq_p} A must be smaller than the "
            f"S-state radius {targets.r_eq_s} A")
    evaluations = 0

    def objective(x):
        nonlocal evaluations
        evaluations += 1
        if x[0] <= 0 or x[1] <= 0:
            return math.inf
        try:
            pots = apply_parameters(template, x)
            if min(pots.v_p_sigma.r_e, pots.v_p_pi.r_e) <= 0:
                return math.inf
            out = model_outputs(pots, sigma, quad, options, table, mode, targets.svp_bar,
                                xtol=CALIBRATION_XTOL)
        except (CalibrationError, ValueError, RuntimeError):
            return math.inf
        return float(np.sum(np.square(_residuals(out, targets))))

    x0 = np.array(template_parameters(template))
    # simplex scaled to the problem: r_e and shift move in bohr, a relatively
    simplex = np.array([x0, x0 + [0.5, 0, 0], x0 + [0, 0.1 * x0[1], 0], x0 + [0, 0, 0.3]])
    res = minimize(objective, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": 1e-9, "fatol": 1e-14,
                            "maxiter": maxiter, "maxfev": 2 * maxiter})
    best = apply_parameters(template, res.x)
    try:
        out = model_outputs(best, sigma, quad, options, table, mode, targets.svp_bar,
                            xtol=CALIBRATION_XTOL)
    except CalibrationError as exc:
        raise CalibrationError(f"calibration failed: {exc}", None, best) from exc
    resid = _residuals(out, targets)
    logger.info("calibration finished after %d evaluations, residuals %s", evaluations, resid)
    if max(abs(r) for r in resid) > 1.0:
        raise CalibrationError(
            "calibration did not reach the target tolerance; best outputs "
            f"R_S={out.r_eq_s:.4f} A, R_P={out.r_eq_p:.4f} A, lambda0={out.lambda0:.4f} nm",
            resid, best)
    return CalibrationResult(best, out, resid, tuple(float(x) for x in res.x), evaluations)
