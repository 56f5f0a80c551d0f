"""Radial quadrature of the energy integrands.

The adaptive Gauss-Kronrod kernel comes from the compiled ``_kernels``
extension when it is importable; otherwise (or when the environment
variable ``HELIOBUBBLE_PURE_PYTHON`` is set to a non-empty value) the
pure-Python implementation in ``_kernels_py`` is used.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels_py

logger = logging.getLogger(__name__)


def _select_backend():
    if os.environ.get("HELIOBUBBLE_PURE_PYTHON"):
        return _kernels_py, "python"
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        return _kernels_py, "python"
    return _kernels, "cython"


_backend, BACKEND = _select_backend()

MODE_INTERACTION = _kernels_py.MODE_INTERACTION
MODE_KINETIC = _kernels_py.MODE_KINETIC

_EMPTY_TERMS = np.zeros((0, 6))
_EMPTY_KNOTS = np.zeros(0)
_EMPTY_COEFS = np.zeros((4, 0))


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-8
    absolute_tolerance: float = 0.0
    # outer truncation R0 + truncation_widths / alpha (extended to potential cutoffs)
    truncation_widths: float = 40.0
    limit: int = 2000

    def __post_init__(self):
        if not self.relative_tolerance > 0 and not self.absolute_tolerance > 0:
            raise ValueError("at least one of relative/absolute tolerance must be positive")
        if self.truncation_widths <= 0:
            raise ValueError("truncation_widths must be positive")
        if self.limit < 1:
            raise ValueError("limit must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


class Integral(NamedTuple):
    value: float
    error: float
    evaluations: int = 0


def radial_integral(mode, r0, alpha, rho0, upper, quad: QuadratureSpec = DEFAULT_QUADRATURE,
                    terms=None, knots=None, coefs=None, backend=None) -> Integral:
    """Integrate the selected radial integrand over [r0, upper]."""
    kernel = backend or _backend
    terms = _EMPTY_TERMS if terms is None else np.ascontiguousarray(terms, dtype=float)
    knots = _EMPTY_KNOTS if knots is None else np.ascontiguousarray(knots, dtype=float)
    coefs = _EMPTY_COEFS if coefs is None else np.ascontiguousarray(coefs, dtype=float)
    if upper <= r0:
        return Integral(0.0, 0.0, 0)
    value, err, neval, ier = kernel.radial_integral(
        int(mode), float(r0), float(alpha), float(rho0), terms, knots, coefs,
        float(r0), float(upper), quad.relative_tolerance, quad.absolute_tolerance, quad.limit,
    )
    if ier == _kernels_py.BAD_INTEGRAND or not math.isfinite(value):
        raise QuadratureError("integrand is not finite on the integration range", value, err)
    if ier == _kernels_py.LIMIT_REACHED:
        raise QuadratureError(
            f"quadrature did not converge within {quad.limit} subintervals "
            f"(value {value:.6g}, achieved error {err:.3g})", value, err)
    return Integral(value, err, neval)
