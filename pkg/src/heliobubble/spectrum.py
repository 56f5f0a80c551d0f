"""Emission spectra: synthesis, three-Gaussian fits and line-series assembly.

Wavelengths are in nm, intensities in counts. A line is described by
(center, width, amplitude) where ``width`` is the Gaussian standard
deviation and ``amplitude`` the peak height before any instrument
convolution. The instrument function is a rectangle of full width
``resolution``; convolving with it is optional (off by default).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter1d
from scipy.signal import find_peaks, peak_widths
from scipy.special import erf

from .equilibrium import LINES, LineSeries

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 0.025  # nm
BASELINE_MODELS = ("constant", "linear")
_SQRT2 = math.sqrt(2.0)
_FWHM = 2.0 * math.sqrt(2.0 * math.log(2.0))


class SpectrumError(ValueError):
    pass


class FitError(RuntimeError):
    def __init__(self, message, params=None, diagnostics=None):
        super().__init__(message)
        self.params = params
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True, eq=False)
class Spectrum:
    wavelength: np.ndarray
    intensity: np.ndarray
    sigma: np.ndarray | None = None
    pressure: float | None = None  # bar
    resolution: float = DEFAULT_RESOLUTION
    source: str = ""

    def __post_init__(self):
        lam = np.asarray(self.wavelength, dtype=float)
        y = np.asarray(self.intensity, dtype=float)
        if lam.ndim != 1 or lam.shape != y.shape:
            raise SpectrumError("wavelength and intensity must be 1-D arrays of equal length")
        if np.any(np.diff(lam) <= 0):
            raise SpectrumError("wavelengths must be strictly increasing")
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(y))):
            raise SpectrumError("spectrum samples must be finite")
        object.__setattr__(self, "wavelength", lam)
        object.__setattr__(self, "intensity", y)
        if self.sigma is not None:
            s = np.broadcast_to(np.asarray(self.sigma, dtype=float), lam.shape).copy()
            if np.any(~(s > 0)):
                raise SpectrumError("intensity uncertainties must be positive")
            object.__setattr__(self, "sigma", s)
        if not self.resolution > 0:
            raise SpectrumError("resolution must be positive")

    def __len__(self):
        return len(self.wavelength)


# -- line shapes --------------------------------------------------------------

def gaussian(x, center, width, amplitude):
    return amplitude * np.exp(-0.5 * ((x - center) / width) ** 2)


def gaussian_box(x, center, width, amplitude, resolution):
    """Gaussian convolved with a unit-area rectangle of full width ``resolution``."""
    h = 0.5 * resolution
    u = (x - center) / (_SQRT2 * width)
    d = h / (_SQRT2 * width)
    return amplitude * width * math.sqrt(math.pi / 2.0) / resolution * (erf(u + d) - erf(u - d))


def line_model(x, lines, baseline=0.0, baseline_slope=0.0, resolution=None, x_ref=0.0):
    y = np.full_like(np.asarray(x, dtype=float), baseline) + baseline_slope * (x - x_ref)
    for center, width, amplitude in lines:
        if resolution:
            y = y + gaussian_box(x, center, width, amplitude, resolution)
        else:
            y = y + gaussian(x, center, width, amplitude)
    return y


def synthesize(lines, baseline=0.0, noise_sd=0.0, grid=(515.0, 520.0, 0.025), *,
               resolution=DEFAULT_RESOLUTION, convolve=False, seed=0, pressure=None,
               source="synthetic") -> Spectrum:
    """Three-line spectrum on a uniform grid ``(start, stop, step)`` plus seeded noise."""
    start, stop, step = (float(v) for v in grid)
    if not step > 0 or not stop > start:
        raise SpectrumError("grid needs start < stop and step > 0")
    for _, width, _ in lines:
        if not width > 0:
            raise SpectrumError("line widths must be positive")
    n = int(round((stop - start) / step)) + 1
    x = start + step * np.arange(n)
    y = line_model(x, lines, baseline, resolution=resolution if convolve else None)
    sigma = None
    if noise_sd > 0:
        rng = np.random.default_rng(seed)
        y = y + rng.normal(0.0, noise_sd, n)
        sigma = np.full(n, float(noise_sd))
    return Spectrum(x, y, sigma, pressure, resolution, source)


# -- fitting ------------------------------------------------------------------

@dataclass(frozen=True)
class FittedLine:
    center: float
    width: float
    amplitude: float
    sigma_center: float
    sigma_width: float
    sigma_amplitude: float

    def to_dict(self):
        return {k: getattr(self, k) for k in
                ("center", "width", "amplitude", "sigma_center", "sigma_width", "sigma_amplitude")}


@dataclass(frozen=True, eq=False)
class SpectrumFit:
    lines: tuple
    baseline: float
    sigma_baseline: float
    baseline_slope: float
    covariance: np.ndarray
    chi2: float
    dof: int
    converged: bool
    iterations: int
    gradient_decrement: float
    history: tuple
    convolved: bool
    baseline_model: str
    absolute_sigma: bool
    resolution: float
    x_ref: float = 0.0
    parameter_names: tuple = field(default=())

    @property
    def reduced_chi2(self) -> float:
        return self.chi2 / self.dof if self.dof > 0 else float("nan")

    @property
    def centers(self):
        return tuple(line.center for line in self.lines)

    def model(self, x):
        return line_model(np.asarray(x, dtype=float),
                          [(l.center, l.width, l.amplitude) for l in self.lines],
                          self.baseline, self.baseline_slope,
                          self.resolution if self.convolved else None, self.x_ref)

    def to_dict(self):
        return {
            "lines": [line.to_dict() for line in self.lines],
            "baseline": self.baseline, "sigma_baseline": self.sigma_baseline,
            "baseline_slope": self.baseline_slope, "baseline_model": self.baseline_model,
            "chi2": self.chi2, "dof": self.dof, "reduced_chi2": self.reduced_chi2,
            "converged": self.converged, "iterations": self.iterations,
            "gradient_decrement": self.gradient_decrement,
            "convolved": self.convolved, "resolution_nm": self.resolution,
            "absolute_sigma": self.absolute_sigma,
            "parameter_names": list(self.parameter_names),
            "covariance": np.asarray(self.covariance).tolist(),
        }


def seed_lines(spec: Spectrum, n_lines: int = 3):
    """Initial (center, width, amplitude) guesses from the largest local maxima.

    After light Gaussian smoothing, maxima closer than one FWHM of the
    strongest line are thinned to the highest, and a maximum counts as a
    resolvable peak when it stands 6 noise units above the baseline with
    at least 2 units of prominence. The ``n_lines`` highest are kept.
    """
    y = spec.intensity
    x = spec.wavelength
    step = float(np.median(np.diff(x)))
    if spec.sigma is not None:
        noise = float(np.median(spec.sigma))
    else:
        noise = float(np.median(np.abs(np.diff(y)))) / math.sqrt(2.0) / 0.6745
    kernel = 1.0  # samples
    smooth = gaussian_filter1d(y, kernel, mode="nearest")
    smooth_noise = noise / math.sqrt(2.0 * math.sqrt(math.pi) * kernel)
    base = float(np.percentile(smooth, 10))
    top = int(np.argmax(smooth))
    fwhm_top = float(peak_widths(smooth, [top], rel_height=0.5)[0][0])
    peaks, props = find_peaks(smooth, height=base + 6.0 * smooth_noise,
                              prominence=2.0 * smooth_noise, distance=max(1.0, fwhm_top))
    if len(peaks) < n_lines:
        raise FitError(f"found {len(peaks)} resolvable peak(s), need {n_lines}",
                       diagnostics={"peaks": x[peaks].tolist(), "noise": smooth_noise})
    order = np.argsort(props["peak_heights"])[::-1][:n_lines]
    chosen = np.sort(peaks[order])
    fwhm = peak_widths(smooth, chosen, rel_height=0.5)[0]
    centers = x[chosen]
    gaps = np.diff(centers)
    guesses = []
    for k, idx in enumerate(chosen):
        width = math.sqrt(max((fwhm[k] / _FWHM) ** 2 - kernel**2, 1.0)) * step
        neighbour_gap = min(gaps[k - 1] if k > 0 else np.inf, gaps[k] if k < len(gaps) else np.inf)
        width = min(width, 0.5 * neighbour_gap)
        guesses.append((float(centers[k]), float(width), float(max(smooth[idx] - base, noise))))
    return guesses, base


def _unpack(p, n_lines):
    return [tuple(p[3 * k:3 * k + 3]) for k in range(n_lines)]


def fit_three_gaussians(spec: Spectrum, init=None, *, convolve: bool = False, baseline: str = "constant",
                        max_iter: int = 200, gtol: float = 1e-10) -> SpectrumFit:
    """Damped Gauss-Newton (Levenberg-Marquardt) fit of three Gaussian lines.

    ``init`` is an optional sequence of three (center, width, amplitude)
    guesses in any order; without it the guesses come from ``seed_lines``.
    The fit reports convergence only when the expected chi^2 decrease of a
    further Gauss-Newton step, g^T H^-1 g, is below ``gtol`` relative to chi^2.
    """
    n_lines = 3
    if baseline not in BASELINE_MODELS:
        raise ValueError(f"baseline must be one of {BASELINE_MODELS}")
    if len(spec) < 30:
        raise FitError(f"need at least 30 samples, got {len(spec)}")
    x = spec.wavelength
    y = spec.intensity
    absolute = spec.sigma is not None
    w = 1.0 / spec.sigma if absolute else np.ones_like(y)
    x_ref = float(np.mean(x))
    if init is None:
        guesses, base0 = seed_lines(spec, n_lines)
    else:
        guesses = sorted((tuple(float(v) for v in g) for g in init), key=lambda g: g[0])
        if len(guesses) != n_lines:
            raise ValueError("init must hold three (center, width, amplitude) guesses")
        base0 = float(np.percentile(y, 10))
    resolution = spec.resolution if convolve else None
    linear = baseline == "linear"
    p = np.array([v for g in guesses for v in g] + [base0] + ([0.0] if linear else []))
    n_par = len(p)
    names = tuple(f"{q}{k}" for k in range(n_lines) for q in ("center", "width", "amplitude"))
    names += ("baseline",) + (("baseline_slope",) if linear else ())

    def model(q):
        return line_model(x, _unpack(q, n_lines), q[3 * n_lines], q[-1] if linear else 0.0,
                          resolution, x_ref)

    def jacobian(q):
        J = np.empty((len(x), n_par))
        if resolution is None:
            for k in range(n_lines):
                c, s, a = q[3 * k:3 * k + 3]
                z = (x - c) / s
                e = np.exp(-0.5 * z * z)
                J[:, 3 * k] = a * e * z / s
                J[:, 3 * k + 1] = a * e * z * z / s
                J[:, 3 * k + 2] = e
        else:
            for j in range(3 * n_lines):
                h = 1e-7 * max(abs(q[j]), 1e-3)
                qp, qm = q.copy(), q.copy()
                qp[j] += h
                qm[j] -= h
                J[:, j] = (model(qp) - model(qm)) / (2 * h)
        J[:, 3 * n_lines] = 1.0
        if linear:
            J[:, -1] = x - x_ref
        return J * w[:, None]

    def chi2_of(q):
        r = (y - model(q)) * w
        return float(r @ r), r

    chi2, r = chi2_of(p)
    lam = 1e-3
    history = [chi2]
    converged = False
    decrement = math.inf
    # floating-point floor for the decrement when the data are fitted exactly
    floor = len(x) * (1e-13 * float(np.max(np.abs(y * w))) + 1e-300) ** 2
    it = 0
    for it in range(1, max_iter + 1):
        J = jacobian(p)
        g = J.T @ r
        H = J.T @ J
        try:
            decrement = float(g @ np.linalg.solve(H, g))
        except np.linalg.LinAlgError:
            decrement = math.inf
        if decrement <= gtol * chi2 + floor:
            converged = True
            break
        accepted = False
        for _ in range(30):
            A = H + lam * np.diag(np.diag(H))
            try:
                step = np.linalg.solve(A, g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = p + step
            for k in range(n_lines):
                if trial[3 * k + 1] <= 0:
                    trial[3 * k + 1] = 0.5 * p[3 * k + 1]
                trial[3 * k + 2] = max(trial[3 * k + 2], 0.0)
            new_chi2, new_r = chi2_of(trial)
            if new_chi2 <= chi2:
                p, chi2, r = trial, new_chi2, new_r
                lam = max(lam / 10.0, 1e-12)
                accepted = True
                history.append(chi2)
                break
            lam *= 10.0
        if not accepted:
            # no downhill step at any damping: stationary up to round-off
            J = jacobian(p)
            g = J.T @ r
            try:
                decrement = float(g @ np.linalg.solve(J.T @ J, g))
            except np.linalg.LinAlgError:
                decrement = math.inf
            converged = decrement <= gtol * max(chi2, 1.0) + floor
            break

    if not converged:
        raise FitError(f"no convergence after {it} iterations (decrement {decrement:.3g}, chi2 {chi2:.6g})",
                       params=p, diagnostics={"chi2": chi2, "history": history})
    J = jacobian(p)
    try:
        cov = np.linalg.inv(J.T @ J)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(J.T @ J)
    dof = len(x) - n_par
    if not absolute and dof > 0:
        cov = cov * (chi2 / dof)
    err = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    order = np.argsort(p[0:3 * n_lines:3])
    perm = [3 * k + j for k in order for j in range(3)] + list(range(3 * n_lines, n_par))
    p, err, cov = p[perm], err[perm], cov[np.ix_(perm, perm)]
    fitted = tuple(FittedLine(p[3 * k], p[3 * k + 1], p[3 * k + 2],
                              err[3 * k], err[3 * k + 1], err[3 * k + 2]) for k in range(n_lines))
    lo, hi = x[0], x[-1]
    if any(not lo <= ln.center <= hi for ln in fitted):
        raise FitError("fitted line center outside the data range", params=p)
    return SpectrumFit(
        lines=fitted, baseline=float(p[3 * n_lines]), sigma_baseline=float(err[3 * n_lines]),
        baseline_slope=float(p[-1]) if linear else 0.0, covariance=cov, chi2=chi2, dof=dof,
        converged=converged, iterations=it, gradient_decrement=decrement, history=tuple(history),
        convolved=convolve, baseline_model=baseline, absolute_sigma=absolute,
        resolution=spec.resolution, x_ref=x_ref, parameter_names=names,
    )


# -- line series --------------------------------------------------------------

def extract_line_series(spectra, fits=None, **fit_kwargs):
    """Per-line (pressure, center, sigma_center) series from spectra at several pressures.

    Returns ``(series, fits)`` where ``series`` maps "P0"/"P1"/"P2" to a
    ``LineSeries`` (fitted when it has at least three points).
    """
    spectra = list(spectra)
    if not spectra:
        raise ValueError("no spectra given")
    if any(s.pressure is None for s in spectra):
        raise SpectrumError("every spectrum needs a pressure")
    if fits is None:
        fits = [fit_three_gaussians(s, **fit_kwargs) for s in spectra]
    order = np.argsort([s.pressure for s in spectra], kind="stable")
    spectra = [spectra[i] for i in order]
    fits = [fits[i] for i in order]
    for k in range(1, len(fits)):
        prev, cur = np.array(fits[k - 1].centers), np.array(fits[k].centers)
        # remove the common pressure shift so plain drift is not mistaken for a swap
        drift = float(np.median(cur - prev))
        nearest = [int(np.argmin(np.abs(prev + drift - c))) for c in cur]
        if nearest != list(range(len(cur))):
            raise SpectrumError(
                f"line ordering changes between {spectra[k - 1].pressure} bar and "
                f"{spectra[k].pressure} bar (centers {prev.round(4).tolist()} -> {cur.round(4).tolist()})")
    pressures = tuple(float(s.pressure) for s in spectra)
    series = {}
    for j, line in enumerate(LINES):
        s = LineSeries(line, pressures, tuple(float(f.lines[j].center) for f in fits),
                       tuple(float(f.lines[j].sigma_center) for f in fits))
        series[line] = s.with_fit()
    return series, fits


# -- file I/O -----------------------------------------------------------------

def write_spectrum(spec: Spectrum, path, header: dict | None = None):
    path = Path(path)
    lines = ["# heliobubble spectrum"]
    if spec.pressure is not None:
        lines.append(f"# pressure_bar: {float(spec.pressure)!r}")
    lines.append(f"# resolution_nm: {float(spec.resolution)!r}")
    if spec.source:
        lines.append(f"# source: {spec.source}")
    for key, value in (header or {}).items():
        lines.append(f"# {key}: {value}")
    cols = "wavelength_nm counts" + (" sigma" if spec.sigma is not None else "")
    lines.append(f"# {cols}")
    for i in range(len(spec)):
        row = f"{float(spec.wavelength[i])!r} {float(spec.intensity[i])!r}"
        if spec.sigma is not None:
            row += f" {float(spec.sigma[i])!r}"
        lines.append(row)
    path.write_text("\n".join(lines) + "\n")
    return path


def load_spectrum(path) -> Spectrum:
    """Two- or three-column text (nm, counts[, sigma]); '# key: value' headers."""
    path = Path(path)
    meta, rows = {}, []
    ncols = None
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                body = stripped[1:].strip()
                if ":" in body:
                    key, _, value = body.partition(":")
                    meta[key.strip()] = value.strip()
                continue
            parts = stripped.split("#", 1)[0].split()
            if len(parts) not in (2, 3):
                raise SpectrumError(f"{path}:{lineno}: expected 2 or 3 columns, got {len(parts)}")
            if ncols is None:
                ncols = len(parts)
            elif len(parts) != ncols:
                raise SpectrumError(f"{path}:{lineno}: column count changed from {ncols} to {len(parts)}")
            try:
                rows.append([float(v) for v in parts])
            except ValueError:
                raise SpectrumError(f"{path}:{lineno}: unparseable row {stripped!r}") from None
    if not rows:
        raise SpectrumError(f"{path}: no data rows")
    data = np.array(rows)
    pressure = float(meta["pressure_bar"]) if "pressure_bar" in meta else None
    resolution = float(meta.get("resolution_nm", DEFAULT_RESOLUTION))
    sigma = data[:, 2] if data.shape[1] == 3 else None
    return Spectrum(data[:, 0], data[:, 1], sigma, pressure, resolution, meta.get("source", str(path)))
