"""Parametrized helium density around the defect.

    rho(r) = 0                                              r <  R0
    rho(r) = rho0 * [1 - (1 + a (r - R0)) exp(-a (r - R0))]  r >= R0

Lengths are in bohr and densities in whatever unit ``rho0`` carries
(bohr^-3 number density throughout the model core).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# below this reduced distance the closed form loses digits to cancellation
_SERIES_CUTOFF = 0.05
# guard band (in units of 1/alpha) where (rho')^2/rho is replaced by its limit
KINETIC_GUARD = 1e-8

RADIUS_MODES = ("equal_volume", "r0")


@dataclass(frozen=True)
class DensityProfileParams:
    r0: float
    alpha: float
    rho0: float

    def __post_init__(self):
        if not (math.isfinite(self.r0) and self.r0 >= 0):
            raise ValueError(f"r0 must be >= 0, got {self.r0!r}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be > 0, got {self.alpha!r}")
        if not (math.isfinite(self.rho0) and self.rho0 > 0):
            raise ValueError(f"rho0 must be > 0, got {self.rho0!r}")


def profile_shape(s):
    """1 - (1 + s) exp(-s) for s >= 0, accurate down to s = 0."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    small = s < _SERIES_CUTOFF
    big = ~small
    out[big] = 1.0 - (1.0 + s[big]) * np.exp(-s[big])
    x = s[small]
    # sum_{n>=2} (-1)^n (n-1)/n! s^n, Horner form
    poly = 0.0
    for n in range(10, 1, -1):
        poly = poly * x + (-1) ** n * (n - 1) / math.factorial(n)
    out[small] = poly * x * x
    return out


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(~np.isfinite(r)):
        raise ValueError("radius must be finite and >= 0")
    return r


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


def density_at(params: DensityProfileParams, r):
    r_arr = _check_r(r)
    s = np.maximum(params.alpha * (r_arr - params.r0), 0.0)
    rho = params.rho0 * profile_shape(s)
    return _scalar_or_array(rho, r)


def density_gradient(params: DensityProfileParams, r):
    """Analytic d rho / dr; zero inside the void and at the kink."""
    r_arr = _check_r(r)
    s = np.maximum(params.alpha * (r_arr - params.r0), 0.0)
    grad = params.rho0 * params.alpha * s * np.exp(-s)
    return _scalar_or_array(grad, r)


def kinetic_integrand_limit(params: DensityProfileParams) -> float:
    """lim r -> R0+ of (rho')^2 / rho."""
    return 2.0 * params.rho0 * params.alpha**2


def kinetic_integrand(params: DensityProfileParams, r):
    """(rho')^2 / rho, with the boundary limit substituted in the guard band."""
    r_arr = _check_r(r)
    s = params.alpha * (r_arr - params.r0)
    out = np.zeros_like(s)
    inside = s >= KINETIC_GUARD
    si = s[inside]
    out[inside] = params.rho0 * params.alpha**2 * si * si * np.exp(-2.0 * si) / profile_shape(si)
    out[(s >= 0) & ~inside] = kinetic_integrand_limit(params)
    return _scalar_or_array(out, r)


def equivalent_bubble_radius(params: DensityProfileParams, mode: str = "equal_volume") -> float:
    """Sharp-bubble radius R_B with the same displaced helium volume.

    ``mode="r0"`` returns R0 itself for comparison runs.
    """
    if mode == "r0":
        return params.r0
    if mode != "equal_volume":
        raise ValueError(f"unknown bubble radius mode {mode!r}; expected one of {RADIUS_MODES}")
    r0, w = params.r0, 1.0 / params.alpha
    return (r0**3 + 6 * r0**2 * w + 18 * r0 * w**2 + 24 * w**3) ** (1.0 / 3.0)


def interface_width(params: DensityProfileParams) -> float:
    return 1.0 / params.alpha
