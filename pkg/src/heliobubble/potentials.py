"""Mg-He pair potential curves.

Model forms (Morse, Lennard-Jones) and tabulated curves with cubic-spline
interpolation. Radii are in bohr and energies in hartree; the tabulated
file format uses angstrom for the radius column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np
from scipy.interpolate import CubicSpline

from .constants import DEFAULT_CONSTANTS, PhysicalConstants

# |V| beyond the cutoff is below this fraction of the curve's energy scale
CUTOFF_FRACTION = 1e-14

KIND_MORSE = 0
KIND_LJ = 1
KIND_SPLINE = 2


class PotentialError(ValueError):
    pass


def _radii(r):
    r_arr = np.asarray(r, dtype=float)
    if np.any(~(r_arr > 0)):
        raise PotentialError("pair potentials are only defined for r > 0")
    return r_arr


def _out(values, like):
    return float(values) if np.ndim(like) == 0 else values


@dataclass(frozen=True)
class Morse:
    """D_e [(1 - exp(-a (r - r_e)))^2 - 1]; minimum -D_e at r_e."""

    d_e: float
    r_e: float
    a: float

    def __post_init__(self):
        if not (self.d_e > 0 and self.r_e > 0 and self.a > 0):
            raise PotentialError(f"Morse parameters must be positive: {self}")

    @property
    def long_range_cutoff(self) -> float:
        return self.r_e + math.log(2.0 / CUTOFF_FRACTION) / self.a

    @property
    def energy_scale(self) -> float:
        return self.d_e

    def __call__(self, r):
        r_arr = _radii(r)
        e = np.exp(-self.a * (r_arr - self.r_e))
        v = self.d_e * (e * e - 2.0 * e)
        v = np.where(r_arr > self.long_range_cutoff, 0.0, v)
        return _out(v, r)

    def kernel_rows(self, weight, knot_offset=0):
        return [[KIND_MORSE, weight, self.d_e, self.r_e, self.a, self.long_range_cutoff]], None, None

    def to_dict(self):
        return {"form": "morse", "d_e": self.d_e, "r_e": self.r_e, "a": self.a}


@dataclass(frozen=True)
class LennardJones:
    """epsilon [(r_m/r)^12 - 2 (r_m/r)^6]; minimum -epsilon at r_m."""

    epsilon: float
    r_m: float

    def __post_init__(self):
        if not (self.epsilon > 0 and self.r_m > 0):
            raise PotentialError(f"Lennard-Jones parameters must be positive: {self}")

    @property
    def long_range_cutoff(self) -> float:
        return self.r_m * (2.0 / CUTOFF_FRACTION) ** (1.0 / 6.0)

    @property
    def energy_scale(self) -> float:
        return self.epsilon

    def __call__(self, r):
        r_arr = _radii(r)
        x = (self.r_m / r_arr) ** 6
        v = self.epsilon * (x * x - 2.0 * x)
        v = np.where(r_arr > self.long_range_cutoff, 0.0, v)
        return _out(v, r)

    def kernel_rows(self, weight, knot_offset=0):
        return [[KIND_LJ, weight, self.epsilon, self.r_m, 0.0, self.long_range_cutoff]], None, None

    def to_dict(self):
        return {"form": "lennard_jones", "epsilon": self.epsilon, "r_m": self.r_m}


@dataclass(frozen=True)
class Tabulated:
    """Cubic-spline curve through (r, V) nodes.

    Below the first node the curve is undefined (no extrapolation into the
    repulsive core). Past the last node it continues as V_last (r_last/r)^6.
    """

    r: tuple
    v: tuple
    source: str = field(default="", compare=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if r.ndim != 1 or r.shape != v.shape:
            raise PotentialError("tabulated radii and values must be 1-D and of equal length")
        if len(r) < 4:
            raise PotentialError(f"tabulated curve needs at least 4 nodes, got {len(r)}")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise PotentialError("tabulated nodes must be finite")
        if r[0] <= 0 or np.any(np.diff(r) <= 0):
            raise PotentialError("tabulated radii must be positive and strictly increasing")
        object.__setattr__(self, "r", tuple(float(x) for x in r))
        object.__setattr__(self, "v", tuple(float(x) for x in v))

    @cached_property
    def spline(self) -> CubicSpline:
        return CubicSpline(np.array(self.r), np.array(self.v))

    @property
    def energy_scale(self) -> float:
        return max(abs(x) for x in self.v) or 1.0

    @property
    def long_range_cutoff(self) -> float:
        r_last, v_last = self.r[-1], abs(self.v[-1])
        if v_last == 0.0:
            return r_last
        ratio = v_last / (CUTOFF_FRACTION * self.energy_scale)
        return r_last * max(ratio, 1.0) ** (1.0 / 6.0)

    def __call__(self, r):
        r_arr = _radii(r)
        if np.any(r_arr < self.r[0]):
            raise PotentialError(
                f"r = {float(np.min(r_arr)):.6g} bohr lies below the first tabulated node "
                f"{self.r[0]:.6g} bohr; supply the repulsive core explicitly")
        inside = r_arr < self.r[-1]
        v = np.empty_like(r_arr)
        v[inside] = self.spline(r_arr[inside])
        tail = ~inside
        v[tail] = self.v[-1] * (self.r[-1] / r_arr[tail]) ** 6
        v = np.where(r_arr > self.long_range_cutoff, 0.0, v)
        return _out(v, r)

    def kernel_rows(self, weight, knot_offset=0):
        n = len(self.r)
        coefs = np.zeros((4, n))
        coefs[:, : n - 1] = self.spline.c
        row = [KIND_SPLINE, weight, float(knot_offset), float(n), self.v[-1], self.long_range_cutoff]
        return [row], np.array(self.r), coefs

    def to_dict(self):
        if self.source:
            return {"file": self.source}
        return {"form": "tabulated", "r": list(self.r), "v": list(self.v)}


@dataclass(frozen=True)
class ZeroPotential:
    """V(r) = 0; isolates the bubble terms."""

    @property
    def long_range_cutoff(self) -> float:
        return 0.0

    @property
    def energy_scale(self) -> float:
        return 0.0

    def __call__(self, r):
        r_arr = _radii(r)
        return _out(np.zeros_like(r_arr), r)

    def kernel_rows(self, weight, knot_offset=0):
        return [], None, None

    def to_dict(self):
        return {"form": "zero"}


PotentialCurve = Union[Morse, LennardJones, Tabulated, ZeroPotential]


@dataclass(frozen=True)
class PairPotentialSet:
    """V_S for 3s4s 3S1; V_P_sigma and V_P_pi for 3s3p 3P (no fine structure)."""

    v_s: PotentialCurve
    v_p_sigma: PotentialCurve
    v_p_pi: PotentialCurve

    def to_dict(self):
        return {"v_s": self.v_s.to_dict(), "v_p_sigma": self.v_p_sigma.to_dict(),
                "v_p_pi": self.v_p_pi.to_dict()}


def evaluate(curve: PotentialCurve, r):
    return curve(r)


def pack_terms(weighted):
    """Pack ``[(curve, weight), ...]`` into kernel arrays (terms, knots, coefs)."""
    rows, knots, coefs = [], [], []
    offset = 0
    for curve, weight in weighted:
        r, k, c = curve.kernel_rows(float(weight), offset)
        rows.extend(r)
        if k is not None:
            knots.append(k)
            coefs.append(c)
            offset += len(k)
    terms = np.array(rows, dtype=float).reshape(-1, 6)
    if knots:
        return terms, np.concatenate(knots), np.concatenate(coefs, axis=1)
    return terms, None, None


def curve_from_dict(spec: dict, base_dir: Path | None = None,
                    constants: PhysicalConstants = DEFAULT_CONSTANTS) -> PotentialCurve:
    spec = dict(spec)
    if "file" in spec:
        path = Path(spec["file"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return load_tabulated(path, constants)
    form = spec.pop("form", "morse")
    try:
        if form == "morse":
            return Morse(float(spec.pop("d_e")), float(spec.pop("r_e")), float(spec.pop("a")))
        if form == "lennard_jones":
            return LennardJones(float(spec.pop("epsilon")), float(spec.pop("r_m")))
        if form == "tabulated":
            return Tabulated(tuple(spec.pop("r")), tuple(spec.pop("v")))
        if form == "zero":
            return ZeroPotential()
    except KeyError as exc:
        raise PotentialError(f"{form} potential is missing parameter {exc.args[0]!r}") from None
    raise PotentialError(f"unknown potential form {form!r}")


def load_tabulated(path, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> Tabulated:
    """Read a two-column text file: r [angstrom], V [hartree]; '#' starts a comment."""
    path = Path(path)
    radii, values = [], []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise PotentialError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
            try:
                r_a, v = float(parts[0]), float(parts[1])
            except ValueError:
                raise PotentialError(f"{path}:{lineno}: unparseable row {text!r}") from None
            if not (math.isfinite(r_a) and math.isfinite(v)):
                raise PotentialError(f"{path}:{lineno}: non-finite value")
            if radii and constants.angstrom_to_bohr(r_a) <= radii[-1]:
                what = "duplicated" if constants.angstrom_to_bohr(r_a) == radii[-1] else "non-increasing"
                raise PotentialError(f"{path}:{lineno}: {what} radius {r_a!r}")
            radii.append(constants.angstrom_to_bohr(r_a))
            values.append(v)
    if len(radii) < 4:
        raise PotentialError(f"{path}: need at least 4 rows, found {len(radii)}")
    return Tabulated(tuple(radii), tuple(values), source=str(path))


def write_tabulated(path, r_bohr, v, constants: PhysicalConstants = DEFAULT_CONSTANTS, comment=""):
    path = Path(path)
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append("# r [angstrom]    V [hartree]")
    for r, val in zip(r_bohr, v):
        lines.append(f"{constants.bohr_to_angstrom(float(r))!r} {float(val)!r}")
    path.write_text("\n".join(lines) + "\n")
    return path


# Uncalibrated Morse template: S-state curve is a far, shallow well whose
# repulsive wall is what the bubble feels; P-state sigma/pi curves are
# a weakly and a moderately bound well.
TEMPLATE_POTENTIALS = PairPotentialSet(
    v_s=Morse(d_e=1e-10, r_e=26.0, a=0.6),
    v_p_sigma=Morse(d_e=1e-5, r_e=12.0, a=0.7),
    v_p_pi=Morse(d_e=1e-4, r_e=8.0, a=0.9),
)

# TEMPLATE_POTENTIALS calibrated to R0*(S) = 8.34 A, R0*(P) = 4.85 A at 2.9 mbar
# and 516.48 nm at p = 0, with default constants, sigma = 3.5e-4 J/m^2,
# alpha = 1.18 / bohr, equal-volume R_B, Franck-Condon emission.
CALIBRATED_POTENTIALS = PairPotentialSet(
    v_s=Morse(d_e=1e-10, r_e=26.893261716906064, a=0.5887211126322651),
    v_p_sigma=Morse(d_e=1e-5, r_e=12.453650187928947, a=0.7),
    v_p_pi=Morse(d_e=1e-4, r_e=8.453650187928947, a=0.9),
)
