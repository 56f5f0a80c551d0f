"""Command-line entry point: ``heliobubble <subcommand> [flags]``.

Every output file starts with '#' header lines holding the resolved config
as JSON, so a run can be reproduced from its own output. Exit status is 0
on success, 2 for configuration errors and 1 for computation errors; errors
are reported on stderr as JSON.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .comparison import comparison_table
from .config import ConfigError, RunConfig, load_config
from .energy import defect_energy
from .equilibrium import LINES, emission_wavelength, find_equilibrium, line_wavelengths, pressure_scan
from .profile import density_at, density_gradient
from .spectrum import extract_line_series, fit_three_gaussians, load_spectrum, synthesize, write_spectrum
from .stats import combine_slopes

logger = logging.getLogger("heliobubble")

SUBCOMMANDS = ("density", "energy", "equilibrium", "lines", "scan", "fit-spectrum", "synth", "slopes", "table")


def fmt(x) -> str:
    """9 significant digits, locale independent."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".9g")


def _header(cmd: str, cfg: RunConfig, extra: dict | None = None):
    lines = [f"heliobubble {__version__} {cmd}", "config: " + cfg.to_json(),
             f"sigma_J_m2: {fmt(cfg['sigma'])}"]
    for key, value in (extra or {}).items():
        lines.append(f"{key}: {value}")
    return lines


def write_csv(path: Path, header_lines, columns, rows):
    buf = io.StringIO()
    buf.writelines(f"# {h}\n" for h in header_lines)
    # csv quotes fields holding commas, e.g. term symbols like (5,5/2)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows([fmt(v) for v in row] for row in rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())
    return path


def write_json(path: Path, payload: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _out(cfg: RunConfig, args, default_name: str) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    return Path(cfg["output_dir"]) / default_name


def _angstrom_pairs(cfg, breakdown):
    c = cfg.constants()
    return {"r0_A": c.bohr_to_angstrom(breakdown.profile.r0), "r_b_A": c.bohr_to_angstrom(breakdown.r_b)}


def _breakdown_dict(cfg, b):
    c = cfg.constants()
    d = {k: getattr(b, k) for k in ("e_vol", "e_surf", "e_vk", "e_int", "e_defect")}
    d = {f"{k}_hartree": v for k, v in d.items()}
    d["e_defect_cm-1"] = c.convert_energy(b.e_defect, "hartree", "cm-1")
    d["quadrature_error_hartree"] = b.quadrature_error
    d["state"] = b.state
    d["alpha_per_bohr"] = b.profile.alpha
    d.update(_angstrom_pairs(cfg, b))
    return d


def _equilibrium_dict(cfg, eq):
    c = cfg.constants()
    return {"state": eq.state, "pressure_bar": c.au_to_bar(eq.pressure),
            "r0_star_A": c.bohr_to_angstrom(eq.r0_star), "r_b_star_A": c.bohr_to_angstrom(eq.r_b_star),
            "alpha_per_bohr": eq.alpha, "at_boundary": eq.at_boundary, "certificate": eq.certificate,
            "energy": _breakdown_dict(cfg, eq.breakdown)}


# -- subcommands ----------------------------------------------------------------

def cmd_density(cfg, args):
    c = cfg.constants()
    prof = cfg.options().profile(c.angstrom_to_bohr(args.r0), 0.0)
    r_a = np.linspace(args.rmin, args.rmax, args.points)
    r = np.array([c.angstrom_to_bohr(x) for x in r_a])
    rho = density_at(prof, r)
    grad = density_gradient(prof, r)
    rows = zip(r_a, rho, rho / prof.rho0, grad)
    path = write_csv(_out(cfg, args, "density.csv"),
                     _header("density", cfg, {"r0_A": fmt(args.r0)}),
                     ["r_A", "rho_per_bohr3", "rho_over_rho0", "drho_dr_per_bohr4"], rows)
    return {"file": str(path)}


def cmd_energy(cfg, args):
    c = cfg.constants()
    p = c.bar_to_au(args.pressure)
    prof = cfg.options().profile(c.angstrom_to_bohr(args.r0), p)
    o = cfg.options()
    b = defect_energy(args.state, cfg.potentials(), prof, p, cfg.sigma_au(), cfg.quadrature(),
                      radius_mode=o.radius_mode, angular_prefactor=o.angular_prefactor, constants=c)
    payload = {"command": "energy", "config": cfg.to_dict(), "pressure_bar": args.pressure,
               "result": _breakdown_dict(cfg, b)}
    write_json(_out(cfg, args, "energy.json"), payload)
    return payload["result"]


def cmd_equilibrium(cfg, args):
    c = cfg.constants()
    p = c.bar_to_au(args.pressure)
    states = ("S", "P") if args.state == "both" else (args.state,)
    results = [_equilibrium_dict(cfg, find_equilibrium(s, cfg.potentials(), p, cfg.sigma_au(),
                                                       cfg.quadrature(), None, cfg.options()))
               for s in states]
    payload = {"command": "equilibrium", "config": cfg.to_dict(), "results": results}
    write_json(_out(cfg, args, "equilibrium.json"), payload)
    return results


def cmd_lines(cfg, args):
    c = cfg.constants()
    table = cfg.transitions()
    em = emission_wavelength(cfg.potentials(), c.bar_to_au(args.pressure), cfg.sigma_au(), cfg.quadrature(),
                             cfg["emission_mode"], cfg.options(), table)
    lams = line_wavelengths(em.wavelength, table)
    result = {"pressure_bar": args.pressure, "emission_mode": cfg["emission_mode"],
              "wavelengths_nm": dict(zip(LINES, lams)),
              "delta_energy_hartree": em.delta_energy,
              "r0_S_A": c.bohr_to_angstrom(em.upper.r0_star), "r0_P_A": c.bohr_to_angstrom(em.lower.r0_star)}
    write_json(_out(cfg, args, "lines.json"), {"command": "lines", "config": cfg.to_dict(), "result": result})
    return result


PLOT_SCRIPT = '''"""Plot a heliobubble scan; needs matplotlib (not a package dependency)."""
import sys
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt(sys.argv[1] if len(sys.argv) > 1 else "{csv}", delimiter=",", names=True, comments="#")
fig, ax = plt.subplots()
for line in ("P0", "P1", "P2"):
    ax.plot(data["p_bar"], data["lambda_%s_nm" % line], "o-", label=line)
ax.set_xlabel("pressure [bar]")
ax.set_ylabel("wavelength [nm]")
ax.legend()
fig.savefig("{png}")
'''


def cmd_scan(cfg, args):
    c = cfg.constants()
    grid = cfg.pressure_grid()
    result = pressure_scan(cfg.potentials(), grid, cfg.sigma_au(), cfg.quadrature(), cfg["emission_mode"],
                           cfg.options(), cfg.transitions(), workers=cfg["workers"])
    rows = [(pt.pressure_bar, *pt.wavelengths, pt.r0_s, pt.r0_p) for pt in result.points]
    out = _out(cfg, args, "scan.csv")
    write_csv(out, _header("scan", cfg),
              ["p_bar", "lambda_P0_nm", "lambda_P1_nm", "lambda_P2_nm", "r0_S_A", "r0_P_A"], rows)
    summary = {"command": "scan", "config": cfg.to_dict(),
               "series": {k: s.to_dict() for k, s in result.series.items()},
               "errors": [{"pressure_bar": p, "message": m} for p, m in result.errors],
               "radius_A": {"S": [pt.r0_s for pt in result.points], "P": [pt.r0_p for pt in result.points]}}
    write_json(out.with_name(out.stem + "_summary.json"), summary)
    if args.plot:
        script = out.with_name("plot_" + out.stem + ".py")
        script.write_text(PLOT_SCRIPT.format(csv=out.name, png=out.stem + ".png"))
    if result.errors and not result.points:
        raise RuntimeError(f"every scan point failed: {result.errors[0][1]}")
    fit = result.series["P1"].fit
    return {"file": str(out), "points": len(result.points), "failed": len(result.errors),
            "slope_P1_nm_per_bar": fit.slope if fit else None}


def cmd_synth(cfg, args):
    if not len(args.centers) == len(args.widths) == len(args.amplitudes) == 3:
        raise ValueError("need three centers, widths and amplitudes")
    seed = cfg["seed"] if args.seed is None else args.seed
    spec = synthesize(list(zip(args.centers, args.widths, args.amplitudes)), args.baseline, args.noise,
                      tuple(args.grid), convolve=args.convolve, seed=seed, pressure=args.pressure)
    out = _out(cfg, args, "spectrum.txt")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_spectrum(spec, out, {"config": cfg.to_json(), "seed": seed,
                               "lines": json.dumps([list(t) for t in zip(args.centers, args.widths,
                                                                         args.amplitudes)])})
    return {"file": str(out), "samples": len(spec)}


def cmd_fit_spectrum(cfg, args):
    spec = load_spectrum(args.file)
    fit = fit_three_gaussians(spec, convolve=args.convolve, baseline=args.baseline)
    out = _out(cfg, args, Path(args.file).stem + "_fit.json")
    payload = {"command": "fit-spectrum", "config": cfg.to_dict(), "input": str(args.file),
               "pressure_bar": spec.pressure, "fit": fit.to_dict()}
    write_json(out, payload)
    model = fit.model(spec.wavelength)
    rows = zip(spec.wavelength, spec.intensity, model, spec.intensity - model)
    write_csv(out.with_name(Path(args.file).stem + "_residuals.csv"), _header("fit-spectrum", cfg),
              ["wavelength_nm", "counts", "model", "residual"], rows)
    return {"centers_nm": list(fit.centers), "sigma_centers_nm": [ln.sigma_center for ln in fit.lines],
            "reduced_chi2": fit.reduced_chi2, "converged": fit.converged}


def cmd_slopes(cfg, args):
    spectra = [load_spectrum(f) for f in args.files]
    series, fits = extract_line_series(spectra, convolve=args.convolve, baseline=args.baseline)
    rows = []
    for k, p in enumerate(series["P0"].pressures):
        rows.append((p, *(series[ln].wavelengths[k] for ln in LINES), *(series[ln].sigmas[k] for ln in LINES)))
    out = _out(cfg, args, "slopes.csv")
    write_csv(out, _header("slopes", cfg),
              ["p_bar", "center_P0_nm", "center_P1_nm", "center_P2_nm",
               "sigma_P0_nm", "sigma_P1_nm", "sigma_P2_nm"], rows)
    payload = {"command": "slopes", "config": cfg.to_dict(), "inputs": [str(f) for f in args.files],
               "series": {k: s.to_dict() for k, s in series.items()}}
    fitted = [series[ln] for ln in LINES if series[ln].fit is not None]
    if len(fitted) == len(LINES):
        reference = tuple(args.reference) if args.reference else None
        comb = combine_slopes([s.fit.slope for s in fitted], [s.fit.sigma_slope for s in fitted],
                              [s.fit.dof for s in fitted], reference=reference,
                              significance=args.significance, labels=list(LINES))
        payload["combination"] = comb.to_dict()
    write_json(out.with_name(out.stem + "_summary.json"), payload)
    return payload.get("combination", {"series": len(fitted)})


def cmd_table(cfg, args):
    rows = comparison_table()
    out = _out(cfg, args, "table1.csv")
    write_csv(out, _header("table", cfg),
              ["species", "transition", "lambda_free_nm", "lambda_svp_nm", "slope_nm_per_bar",
               "relative_shift_pct_per_bar", "printed_pct_per_bar", "matches_printed"],
              [(r.species, r.transition, r.lambda_free, r.lambda_svp, r.slope, r.relative_shift,
                r.printed_relative_shift, "yes" if r.matches_printed else "no") for r in rows])
    if not args.quiet:
        for r in rows:
            print(f"{r.species:4s} {r.transition:48s} {fmt(r.slope):>7s} nm/bar "
                  f"{r.relative_shift:+.3f} %/bar (printed {r.printed_relative_shift:+.3f})")
    return {"file": str(out), "rows": len(rows), "all_match": all(r.matches_printed for r in rows)}


# -- parser -----------------------------------------------------------------------

def _parse_set(items):
    overrides = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError([(item, "expected key=value")])
        overrides[key.strip()] = yaml.safe_load(value)
    return overrides


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file (default: $HELIOBUBBLE_CONFIG)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config field, e.g. --set quadrature.relative_tolerance=1e-10")
    common.add_argument("--output-dir", help="directory for output files (config: output_dir)")
    common.add_argument("--out", help="explicit output file")
    common.add_argument("-q", "--quiet", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="heliobubble", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", parents=[common], help="helium density profile")
    p.add_argument("--r0", type=float, default=5.0, help="profile onset R0 [angstrom]")
    p.add_argument("--rmin", type=float, default=0.0)
    p.add_argument("--rmax", type=float, default=15.0)
    p.add_argument("--points", type=int, default=301)

    for name in ("energy", "equilibrium", "lines"):
        p = sub.add_parser(name, parents=[common], help=f"{name} at one pressure")
        p.add_argument("--pressure", type=float, default=0.0, help="bar")
        if name == "energy":
            p.add_argument("--state", choices=("S", "P"), default="S")
            p.add_argument("--r0", type=float, required=True, help="angstrom")
        if name == "equilibrium":
            p.add_argument("--state", choices=("S", "P", "both"), default="both")

    p = sub.add_parser("scan", parents=[common], help="pressure scan of the three lines")
    p.add_argument("--pmin", type=float)
    p.add_argument("--pmax", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--plot", action="store_true", help="also write a matplotlib script")

    p = sub.add_parser("synth", parents=[common], help="write a synthetic three-line spectrum")
    p.add_argument("--centers", type=float, nargs=3, default=[517.0, 517.4, 518.4])
    p.add_argument("--widths", type=float, nargs=3, default=[0.1, 0.1, 0.1])
    p.add_argument("--amplitudes", type=float, nargs=3, default=[1000.0, 1000.0, 1000.0])
    p.add_argument("--baseline", type=float, default=50.0)
    p.add_argument("--noise", type=float, default=0.0, help="noise standard deviation [counts]")
    p.add_argument("--grid", type=float, nargs=3, default=[516.0, 519.5, 0.025], metavar=("START", "STOP", "STEP"))
    p.add_argument("--pressure", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--convolve", action="store_true")

    for name in ("fit-spectrum", "slopes"):
        p = sub.add_parser(name, parents=[common], help="three-Gaussian line fits")
        if name == "fit-spectrum":
            p.add_argument("file")
        else:
            p.add_argument("files", nargs="+")
            p.add_argument("--reference", type=float, nargs=2, metavar=("SLOPE", "SIGMA"),
                           help="calculated slope to test the measured slopes against")
            p.add_argument("--significance", type=float, default=0.05)
        p.add_argument("--convolve", action="store_true")
        p.add_argument("--baseline", choices=("constant", "linear"), default="constant")

    sub.add_parser("table", parents=[common], help="relative pressure shifts of published transitions")
    return parser


COMMANDS = {"density": cmd_density, "energy": cmd_energy, "equilibrium": cmd_equilibrium,
            "lines": cmd_lines, "scan": cmd_scan, "synth": cmd_synth, "fit-spectrum": cmd_fit_spectrum,
            "slopes": cmd_slopes, "table": cmd_table}


def _error(payload, code):
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        overrides = _parse_set(args.set)
        if args.output_dir:
            overrides["output_dir"] = args.output_dir
        if args.command == "scan":
            for flag, key in (("pmin", "pressure.pmin"), ("pmax", "pressure.pmax"),
                              ("steps", "pressure.steps"), ("workers", "workers")):
                if getattr(args, flag) is not None:
                    overrides[key] = getattr(args, flag)
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        return _error(exc.to_dict(), 2)
    try:
        result = COMMANDS[args.command](cfg, args)
    except Exception as exc:  # reported as a computation failure with its origin
        logger.debug("failure", exc_info=True)
        return _error({"error": type(exc).__name__, "module": type(exc).__module__, "message": str(exc)}, 1)
    if not args.quiet and args.command != "table":
        print(json.dumps(result, indent=2, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
