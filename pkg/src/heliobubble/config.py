"""Run configuration: YAML key-value files, defaults and per-field provenance.

Nested sections (``constants``, ``quadrature``, ``pressure``, ``transitions``,
``potentials``) flatten to dotted field names such as
``quadrature.relative_tolerance``. Every field is validated before any
computation and unknown keys are rejected by name.
"""

from __future__ import annotations

import difflib
import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .constants import DEFAULT_CONSTANTS, PhysicalConstants
from .equilibrium import ALPHA_MODES, EMISSION_MODES, MAX_SCAN_PRESSURE_BAR, ModelOptions, TransitionTable
from .energy import ANGULAR_PREFACTORS
from .potentials import CALIBRATED_POTENTIALS, PairPotentialSet, PotentialError, curve_from_dict
from .quadrature import QuadratureSpec

ENV_VAR = "HELIOBUBBLE_CONFIG"
SECTIONS = ("constants", "quadrature", "pressure", "transitions", "potentials")
RADIUS_MODES = ("equal_volume", "r0")
_CURVES = ("v_s", "v_p_sigma", "v_p_pi")


@dataclass(frozen=True)
class Field:
    kind: str  # float | int | choice | str | potential
    default: Any
    choices: tuple = ()
    positive: bool = False
    nonnegative: bool = False
    help: str = ""


SCHEMA: dict[str, Field] = {
    "constants.hartree_ev": Field("float", DEFAULT_CONSTANTS.hartree_ev, positive=True, help="eV"),
    "constants.bohr_angstrom": Field("float", DEFAULT_CONSTANTS.bohr_angstrom, positive=True, help="angstrom"),
    "constants.hc_ev_nm": Field("float", DEFAULT_CONSTANTS.hc_ev_nm, positive=True, help="eV nm"),
    "constants.m_he_amu": Field("float", DEFAULT_CONSTANTS.m_he_amu, positive=True, help="u"),
    "constants.amu_electron_masses": Field("float", DEFAULT_CONSTANTS.amu_electron_masses, positive=True),
    "sigma": Field("float", DEFAULT_CONSTANTS.sigma_j_m2, nonnegative=True, help="surface tension, J/m^2 (0 switches the term off)"),
    "rho0": Field("float", DEFAULT_CONSTANTS.rho0_g_cm3, positive=True, help="bulk density, g/cm^3"),
    "alpha": Field("float", 1.18, positive=True, help="interface steepness, 1/bohr"),
    "alpha_mode": Field("choice", "fixed", ALPHA_MODES),
    "radius_mode": Field("choice", "equal_volume", RADIUS_MODES),
    "angular_prefactor": Field("choice", "2pi", ANGULAR_PREFACTORS),
    "emission_mode": Field("choice", "franck_condon", EMISSION_MODES),
    "potentials.v_s": Field("potential", CALIBRATED_POTENTIALS.v_s.to_dict()),
    "potentials.v_p_sigma": Field("potential", CALIBRATED_POTENTIALS.v_p_sigma.to_dict()),
    "potentials.v_p_pi": Field("potential", CALIBRATED_POTENTIALS.v_p_pi.to_dict()),
    "quadrature.relative_tolerance": Field("float", 1e-8, nonnegative=True),
    "quadrature.absolute_tolerance": Field("float", 0.0, nonnegative=True),
    "quadrature.truncation_widths": Field("float", 40.0, positive=True),
    "quadrature.limit": Field("int", 2000, positive=True),
    "pressure.pmin": Field("float", 0.0, nonnegative=True, help="bar"),
    "pressure.pmax": Field("float", 24.0, nonnegative=True, help="bar"),
    "pressure.steps": Field("int", 13, positive=True),
    "transitions.p0": Field("float", 516.73, positive=True, help="free 3S1-3P0 wavelength, nm"),
    "transitions.p1": Field("float", 517.27, positive=True, help="free 3S1-3P1 wavelength, nm"),
    "transitions.p2": Field("float", 518.36, positive=True, help="free 3S1-3P2 wavelength, nm"),
    "output_dir": Field("str", "."),
    "seed": Field("int", 0, nonnegative=True),
    "workers": Field("int", 1, positive=True),
}


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists (field, message) pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{k}: {m}" for k, m in self.errors))

    def to_dict(self):
        return {"error": "invalid configuration",
                "fields": [{"field": k, "message": m} for k, m in self.errors]}


def _coerce(name: str, spec: Field, value):
    """Return (value, error message or None)."""
    if spec.kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return None, f"expected a number, got {type(value).__name__} {value!r}"
        value = float(value)
        if not math.isfinite(value):
            return None, "must be finite"
    elif spec.kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            return None, f"expected an integer, got {type(value).__name__} {value!r}"
    elif spec.kind in ("choice", "str"):
        if not isinstance(value, str):
            return None, f"expected a string, got {type(value).__name__} {value!r}"
        if spec.kind == "choice" and value not in spec.choices:
            return None, f"must be one of {list(spec.choices)}, got {value!r}"
    elif spec.kind == "potential":
        if not isinstance(value, dict):
            return None, f"expected a mapping (form and parameters, or file), got {value!r}"
        value = dict(value)
    if spec.positive and not value > 0:
        return None, f"must be positive, got {value!r}"
    if spec.nonnegative and not value >= 0:
        return None, f"must be non-negative, got {value!r}"
    return value, None


def _flatten(data: dict, origin: str):
    flat, errors = {}, []
    for key, value in data.items():
        key = str(key)
        if key in SECTIONS:
            if not isinstance(value, dict):
                errors.append((key, f"section must be a mapping, got {value!r}"))
                continue
            for sub, v in value.items():
                flat[f"{key}.{sub}"] = v
        else:
            flat[key] = value
    return flat, errors


def _unknown(key):
    close = difflib.get_close_matches(key, list(SCHEMA), n=1)
    hint = f" (did you mean {close[0]!r}?)" if close else ""
    return key, f"unknown key{hint}"


@dataclass(frozen=True)
class RunConfig:
    values: dict
    provenance: dict
    base_dir: Path = field(default=Path("."), compare=False)

    def __getitem__(self, name):
        return self.values[name]

    # -- construction ---------------------------------------------------------
    @classmethod
    def defaults(cls) -> "RunConfig":
        values = {k: (dict(f.default) if f.kind == "potential" else f.default) for k, f in SCHEMA.items()}
        return cls(values, {k: "default" for k in SCHEMA})

    def with_values(self, data: dict, origin: str = "user", base_dir: Path | None = None) -> "RunConfig":
        """New config with ``data`` (nested or dotted keys) applied and validated."""
        flat, errors = _flatten(data, origin)
        values, prov = dict(self.values), dict(self.provenance)
        for key, value in flat.items():
            spec = SCHEMA.get(key)
            if spec is None:
                errors.append(_unknown(key))
                continue
            coerced, err = _coerce(key, spec, value)
            if err:
                errors.append((key, err))
                continue
            values[key] = coerced
            prov[key] = origin
        new = RunConfig(values, prov, base_dir if base_dir is not None else self.base_dir)
        errors.extend(new._cross_check())
        if errors:
            raise ConfigError(errors)
        return new

    def _cross_check(self):
        errors = []
        v = self.values
        if v["pressure.pmax"] < v["pressure.pmin"]:
            errors.append(("pressure.pmax", "must not be below pressure.pmin"))
        if v["pressure.pmax"] > MAX_SCAN_PRESSURE_BAR:
            errors.append(("pressure.pmax", f"must not exceed {MAX_SCAN_PRESSURE_BAR} bar"))
        if v["pressure.steps"] > 1 and v["pressure.pmax"] == v["pressure.pmin"]:
            errors.append(("pressure.steps", "more than one step needs pmax > pmin"))
        if not (v["quadrature.relative_tolerance"] > 0 or v["quadrature.absolute_tolerance"] > 0):
            errors.append(("quadrature", "one of relative_tolerance / absolute_tolerance must be positive"))
        if not v["transitions.p0"] < v["transitions.p1"] < v["transitions.p2"]:
            errors.append(("transitions", "free wavelengths must increase P0 < P1 < P2"))
        for name in _CURVES:
            key = f"potentials.{name}"
            try:
                curve_from_dict(v[key], self.base_dir, self.constants())
            except (PotentialError, OSError, TypeError, ValueError) as exc:
                errors.append((key, str(exc)))
        return errors

    # -- derived model objects -------------------------------------------------
    def constants(self) -> PhysicalConstants:
        v = self.values
        return replace(DEFAULT_CONSTANTS, hartree_ev=v["constants.hartree_ev"],
                       bohr_angstrom=v["constants.bohr_angstrom"], hc_ev_nm=v["constants.hc_ev_nm"],
                       m_he_amu=v["constants.m_he_amu"],
                       amu_electron_masses=v["constants.amu_electron_masses"],
                       rho0_g_cm3=v["rho0"], sigma_j_m2=v["sigma"])

    def sigma_au(self) -> float:
        return self.constants().surface_tension_to_au(self.values["sigma"])

    def options(self) -> ModelOptions:
        c = self.constants()
        v = self.values
        return ModelOptions(alpha=v["alpha"], rho0=c.mass_density_to_number(v["rho0"]),
                            radius_mode=v["radius_mode"], angular_prefactor=v["angular_prefactor"],
                            alpha_mode=v["alpha_mode"], constants=c)

    def quadrature(self) -> QuadratureSpec:
        v = self.values
        return QuadratureSpec(v["quadrature.relative_tolerance"], v["quadrature.absolute_tolerance"],
                              v["quadrature.truncation_widths"], v["quadrature.limit"])

    def transitions(self) -> TransitionTable:
        v = self.values
        return TransitionTable((("P0", v["transitions.p0"]), ("P1", v["transitions.p1"]),
                                ("P2", v["transitions.p2"])))

    def potentials(self) -> PairPotentialSet:
        c = self.constants()
        curves = [curve_from_dict(self.values[f"potentials.{n}"], self.base_dir, c) for n in _CURVES]
        return PairPotentialSet(*curves)

    def pressure_grid(self):
        v = self.values
        return np.linspace(v["pressure.pmin"], v["pressure.pmax"], v["pressure.steps"])

    # -- serialization -----------------------------------------------------------
    def to_dict(self) -> dict:
        """Nested resolved values; tabulated file paths made absolute."""
        out: dict = {}
        for key, value in self.values.items():
            if SCHEMA[key].kind == "potential" and "file" in value:
                path = Path(value["file"])
                if not path.is_absolute():
                    path = (self.base_dir / path).resolve()
                value = {"file": str(path)}
            if "." in key:
                section, sub = key.split(".", 1)
                out.setdefault(section, {})[sub] = value
            else:
                out[key] = value
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def provenance_summary(self) -> dict:
        return {k: p for k, p in self.provenance.items() if p != "default"}


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the YAML file (``path`` or $HELIOBUBBLE_CONFIG), then overrides."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    cfg = RunConfig.defaults()
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError([("config", f"cannot read {path}: {exc.strerror or exc}")]) from None
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError([("config", f"{path}: not valid YAML: {exc}")]) from None
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError([("config", f"{path}: top level must be a key-value mapping")])
        cfg = cfg.with_values(data, origin=f"file:{path}", base_dir=path.parent)
    if overrides:
        cfg = cfg.with_values(overrides, origin="cli")
    return cfg


def config_from_header(path) -> RunConfig:
    """Rebuild the config embedded in an output file's '# config: {...}' header line."""
    with Path(path).open() as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if body.startswith("config:"):
                data = json.loads(body[len("config:"):])
                return RunConfig.defaults().with_values(data, origin=f"header:{path}")
    raise ConfigError([("config", f"{path}: no embedded config header")])
