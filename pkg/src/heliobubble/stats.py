"""Straight-line fits of wavelength against pressure and slope combination."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class LinearFit:
    intercept: float
    slope: float
    sigma_intercept: float
    sigma_slope: float
    covariance: tuple
    chi2: float
    dof: int
    r_squared: float
    weighted: bool

    def to_dict(self):
        return {
            "intercept": self.intercept, "slope": self.slope,
            "sigma_intercept": self.sigma_intercept, "sigma_slope": self.sigma_slope,
            "chi2": self.chi2, "dof": self.dof, "r_squared": self.r_squared,
            "weighted": self.weighted,
        }


def linear_fit(x, y, sigma=None) -> LinearFit:
    """Weighted least-squares fit of y = intercept + slope * x.

    With ``sigma`` given, the weights are 1/sigma^2 and the covariance is the
    inverse of the weighted normal matrix (absolute uncertainties). Without
    it, unit weights are used and the covariance is scaled by chi2/dof.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    if len(x) < 3:
        raise ValueError(f"linear fit needs at least 3 samples, got {len(x)}")
    weighted = sigma is not None
    if weighted:
        sigma = np.broadcast_to(np.asarray(sigma, dtype=float), x.shape)
        if np.any(~(sigma > 0)):
            raise ValueError("uncertainties must be positive")
        w = 1.0 / sigma**2
    else:
        w = np.ones_like(x)
    s = w.sum()
    sx = (w * x).sum() / s
    sy = (w * y).sum() / s
    dx = x - sx
    sxx = (w * dx * dx).sum()
    if not sxx > 1e-300 or sxx <= 1e-14 * (w * x * x).sum():
        raise FitError("degenerate design: all abscissae are equal")
    slope = (w * dx * (y - sy)).sum() / sxx
    intercept = sy - slope * sx
    resid = y - intercept - slope * x
    chi2 = float((w * resid**2).sum())
    dof = len(x) - 2
    var_slope = 1.0 / sxx
    var_int = 1.0 / s + sx * sx / sxx
    cov_is = -sx / sxx
    if not weighted:
        scale = chi2 / dof if dof > 0 else 0.0
        var_slope, var_int, cov_is = var_slope * scale, var_int * scale, cov_is * scale
    ss_tot = (w * (y - sy) ** 2).sum()
    r2 = 1.0 - chi2 / ss_tot if ss_tot > 0 else 1.0
    return LinearFit(
        intercept=float(intercept), slope=float(slope),
        sigma_intercept=math.sqrt(var_int), sigma_slope=math.sqrt(var_slope),
        covariance=((float(var_int), float(cov_is)), (float(cov_is), float(var_slope))),
        chi2=chi2, dof=dof, r_squared=float(r2), weighted=weighted,
    )


@dataclass(frozen=True)
class TTest:
    label: str
    t: float
    dof: float
    critical: float

    @property
    def passed(self) -> bool:
        return abs(self.t) < self.critical

    def to_dict(self):
        return {"label": self.label, "t": self.t, "dof": self.dof, "critical": self.critical,
                "passed": self.passed}


@dataclass(frozen=True)
class SlopeCombination:
    mean: float
    sigma: float
    pairwise: tuple
    reference_tests: tuple
    significance: float

    @property
    def pairwise_consistent(self) -> bool:
        return all(t.passed for t in self.pairwise)

    @property
    def reference_consistent(self):
        if not self.reference_tests:
            return None
        return all(t.passed for t in self.reference_tests)

    @property
    def consistent(self) -> bool:
        """Verdict of the test against a calculated slope when one was given,
        otherwise of the pairwise slope comparisons."""
        if self.reference_tests:
            return self.reference_consistent
        return self.pairwise_consistent

    def to_dict(self):
        return {
            "mean": self.mean, "sigma": self.sigma, "significance": self.significance,
            "pairwise": [t.to_dict() for t in self.pairwise],
            "pairwise_consistent": self.pairwise_consistent,
            "reference_tests": [t.to_dict() for t in self.reference_tests],
            "reference_consistent": self.reference_consistent,
            "consistent": self.consistent,
        }


def _critical(dof, significance):
    if dof is None or math.isinf(dof):
        return float(_sps.norm.ppf(1.0 - significance / 2.0))
    return float(_sps.t.ppf(1.0 - significance / 2.0, dof))


def combine_slopes(slopes, sigmas, dofs=None, *, reference=None, significance=0.05,
                   labels=None) -> SlopeCombination:
    """Inverse-variance mean of fitted slopes plus Student's t consistency tests.

    Pairwise tests use t = (m_i - m_j) / sqrt(s_i^2 + s_j^2) with dof_i + dof_j
    degrees of freedom (normal quantiles when ``dofs`` is None). ``reference``
    is an optional ``(slope, sigma[, dof])`` calculated value; each measured
    slope is then also tested against it.
    """
    m = np.asarray(slopes, dtype=float)
    s = np.asarray(sigmas, dtype=float)
    if m.shape != s.shape or m.ndim != 1 or len(m) < 1:
        raise ValueError("slopes and sigmas must be 1-D and of equal length")
    if np.any(~np.isfinite(m)) or np.any(~(s > 0)):
        raise ValueError("slopes must be finite and uncertainties positive")
    if dofs is not None and len(dofs) != len(m):
        raise ValueError("dofs must match slopes")
    labels = list(labels) if labels is not None else [str(i) for i in range(len(m))]
    w = 1.0 / s**2
    mean = float((w * m).sum() / w.sum())
    sigma = float(1.0 / math.sqrt(w.sum()))

    pairwise = []
    for i, j in itertools.combinations(range(len(m)), 2):
        t = (m[i] - m[j]) / math.sqrt(s[i] ** 2 + s[j] ** 2)
        dof = None if dofs is None else float(dofs[i] + dofs[j])
        pairwise.append(TTest(f"{labels[i]}-{labels[j]}", float(t), dof if dof is not None else math.inf,
                              _critical(dof, significance)))

    ref_tests = []
    if reference is not None:
        ref_m, ref_s = float(reference[0]), float(reference[1])
        ref_dof = reference[2] if len(reference) > 2 else None
        for i in range(len(m)):
            t = (m[i] - ref_m) / math.sqrt(s[i] ** 2 + ref_s**2)
            # an unknown dof on either side counts as zero; both unknown -> normal
            dof = None
            if dofs is not None or ref_dof is not None:
                dof = float((dofs[i] if dofs is not None else 0) + (ref_dof or 0))
            ref_tests.append(TTest(f"{labels[i]}-reference", float(t),
                                   dof if dof is not None else math.inf, _critical(dof, significance)))
    return SlopeCombination(mean, sigma, tuple(pairwise), tuple(ref_tests), significance)
