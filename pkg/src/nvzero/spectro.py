"""Line-shape synthesis, response convolution, and Gaussian least squares.

The fitted model is always an intrinsic Gaussian (or symmetric pair)
convolved with the instrument response; fitted widths are therefore
deconvolved widths, not total widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import PhysicalConstants

FWHM_TO_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))
DEFAULT_RESPONSE_FWHM = 24.5            # GHz
DEFAULT_SIGMA_FLOOR = 0.01              # GHz
KERNEL_HALFWIDTH_SIGMAS = 5.0


@dataclass(frozen=True)
class Spectrum:
    """Sampled counts on a uniform frequency grid with a known response."""

    freq: np.ndarray                    # GHz, strictly increasing, uniform
    counts: np.ndarray
    response_fwhm: float | None = DEFAULT_RESPONSE_FWHM
    response_kernel: np.ndarray | None = None   # sampled alternative, same dx

    def __post_init__(self):
        f = np.asarray(self.freq, dtype=float)
        c = np.asarray(self.counts, dtype=float)
        if f.ndim != 1 or f.shape != c.shape or f.size < 2:
            raise ValueError("freq and counts must be matching 1-d arrays")
        df = np.diff(f)
        if np.any(df <= 0):
            raise ValueError("frequencies must be strictly increasing")
        dx = df.mean()
        if np.max(np.abs(df - dx)) > 1e-9 * dx:
            raise ValueError("grid must be uniform to 1e-9 relative spacing")
        if self.response_fwhm is None and self.response_kernel is None:
            raise ValueError("a response (fwhm or sampled kernel) is required")
        object.__setattr__(self, "freq", f)
        object.__setattr__(self, "counts", c)

    @property
    def dx(self) -> float:
        return float(np.diff(self.freq).mean())

    @classmethod
    def from_samples(cls, freq, counts, response_fwhm=DEFAULT_RESPONSE_FWHM,
                     response_kernel=None) -> "Spectrum":
        """Build from possibly jittered samples, resampling if within 1%."""
        f = np.asarray(freq, dtype=float)
        c = np.asarray(counts, dtype=float)
        order = np.argsort(f)
        f, c = f[order], c[order]
        df = np.diff(f)
        if np.any(df <= 0):
            raise ValueError("duplicate frequency samples")
        dx = df.mean()
        jitter = np.max(np.abs(df - dx)) / dx
        if jitter > 0.01:
            raise ValueError(f"grid jitter {jitter:.3%} exceeds 1%")
        if jitter > 1e-9:
            uniform = np.linspace(f[0], f[-1], f.size)
            c = np.interp(uniform, f, c)
            f = uniform
        return cls(freq=f, counts=c, response_fwhm=response_fwhm,
                   response_kernel=response_kernel)


def response_sigma(fwhm: float) -> float:
    return fwhm / FWHM_TO_SIGMA


def _kernel(dx: float, sigma_r: float) -> np.ndarray:
    """Discrete response kernel, unit sum so convolution preserves integrals."""
    if sigma_r <= 0:
        return np.array([1.0])
    half = max(1, int(math.ceil(KERNEL_HALFWIDTH_SIGMAS * sigma_r / dx)))
    t = np.arange(-half, half + 1) * dx
    k = np.exp(-0.5 * (t / sigma_r) ** 2)
    return k / k.sum()


def spectrum_kernel(spec: Spectrum) -> np.ndarray:
    if spec.response_kernel is not None:
        k = np.asarray(spec.response_kernel, dtype=float)
        s = k.sum()
        if s <= 0:
            raise ValueError("sampled response must have positive sum")
        return k / s
    return _kernel(spec.dx, response_sigma(spec.response_fwhm))


def convolve_response(y: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    return np.convolve(y, kernel, mode="same")


def gaussian(x: np.ndarray, amplitude: float, center: float, sigma: float) -> np.ndarray:
    return amplitude * np.exp(-0.5 * ((x - center) / sigma) ** 2)


@dataclass(frozen=True)
class FitResult:
    amplitude: float
    center: float
    sigma: float                # GHz, intrinsic (deconvolved) width
    baseline: float
    splitting: float            # 0 for the single model
    ssr: float
    converged: bool
    iterations: int
    at_sigma_floor: bool = False

    def to_dict(self) -> dict:
        return {
            "amplitude": self.amplitude,
            "center": self.center,
            "sigma_GHz": self.sigma,
            "baseline": self.baseline,
            "splitting_GHz": self.splitting,
            "ssr": self.ssr,
            "converged": self.converged,
            "iterations": self.iterations,
            "at_sigma_floor": self.at_sigma_floor,
        }


def _model_and_jacobian(x, kernel, params, splitting):
    """Convolved symmetric-pair model and analytic Jacobian.

    params = (amplitude, center, sigma, baseline); splitting = 0 collapses
    both halves onto one Gaussian.  Convolution is linear, so Jacobian
    columns are convolved derivative fields.
    """
    a, c, sig, base = params
    m = np.zeros_like(x)
    da = np.zeros_like(x)
    dc = np.zeros_like(x)
    dsig = np.zeros_like(x)
    for off in (-0.5 * splitting, +0.5 * splitting):
        u = (x - (c + off)) / sig
        g = 0.5 * a * np.exp(-0.5 * u * u)
        m += g
        da += g / a if a != 0 else 0.5 * np.exp(-0.5 * u * u)
        dc += g * u / sig
        dsig += g * u * u / sig
    m = convolve_response(m, kernel) + base
    jac = np.column_stack(
        [
            convolve_response(da, kernel),
            convolve_response(dc, kernel),
            convolve_response(dsig, kernel),
            np.ones_like(x),
        ]
    )
    return m, jac


def _lm_fit(x, y, kernel, p0, splitting, sigma_floor, max_iter=500):
    """Damped Gauss-Newton on (amplitude, center, sigma, baseline)."""
    p = np.array(p0, dtype=float)
    p[2] = max(p[2], sigma_floor)
    m, jac = _model_and_jacobian(x, kernel, p, splitting)
    r = m - y
    ssr = float(r @ r)
    lam = 1e-3
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        a = jac.T @ jac
        g = jac.T @ r
        diag = np.diag(a).copy()
        diag[diag <= 0] = 1e-30
        try:
            step = np.linalg.solve(a + lam * np.diag(diag), -g)
        except np.linalg.LinAlgError:
            lam *= 10
            continue
        p_new = p + step
        p_new[2] = max(p_new[2], sigma_floor)
        m_new, jac_new = _model_and_jacobian(x, kernel, p_new, splitting)
        r_new = m_new - y
        ssr_new = float(r_new @ r_new)
        if ssr_new <= ssr:
            rel_drop = (ssr - ssr_new) / max(ssr, 1e-300)
            rel_step = np.max(np.abs(p_new - p) / np.maximum(np.abs(p_new), 1e-12))
            p, m, jac, r, ssr = p_new, m_new, jac_new, r_new, ssr_new
            lam = max(lam / 10.0, 1e-12)
            if rel_drop < 1e-10 and rel_step < 1e-8:
                converged = True
                break
        else:
            lam *= 10.0
            if lam > 1e14:
                break
    return p, ssr, converged, it


def _initial_guess(spec: Spectrum, sigma_r: float, sigma_floor: float):
    x, y = spec.freq, spec.counts
    edge = max(2, x.size // 10)
    base0 = float(np.median(np.concatenate([y[:edge], y[-edge:]])))
    w = np.clip(y - base0, 0.0, None)
    tot = w.sum()
    if tot <= 0:
        raise ValueError("flat spectrum: nothing to fit")
    c0 = float((x * w).sum() / tot)
    var = float(((x - c0) ** 2 * w).sum() / tot)
    sig0 = math.sqrt(max(var - sigma_r**2, sigma_floor**2))
    area = tot * spec.dx
    a0 = area / (sig0 * math.sqrt(2.0 * math.pi))
    return a0, c0, sig0, base0


def fit_single(spec: Spectrum, sigma_floor: float = DEFAULT_SIGMA_FLOOR) -> FitResult:
    """Fit one response-convolved Gaussian plus a constant baseline."""
    if spec.freq.size < 8:
        raise ValueError("need at least 8 samples")
    kernel = spectrum_kernel(spec)
    sigma_r = (
        response_sigma(spec.response_fwhm)
        if spec.response_kernel is None
        else _sampled_sigma(spec)
    )
    p0 = _initial_guess(spec, sigma_r, sigma_floor)
    p, ssr, conv, it = _lm_fit(spec.freq, spec.counts, kernel, p0, 0.0, sigma_floor)
    return FitResult(
        amplitude=float(p[0]), center=float(p[1]), sigma=float(p[2]),
        baseline=float(p[3]), splitting=0.0, ssr=ssr, converged=conv,
        iterations=it, at_sigma_floor=bool(p[2] <= sigma_floor * (1 + 1e-12)),
    )


def _sampled_sigma(spec: Spectrum) -> float:
    k = spectrum_kernel(spec)
    t = (np.arange(k.size) - (k.size - 1) / 2.0) * spec.dx
    mean = float((t * k).sum())
    return math.sqrt(max(float(((t - mean) ** 2 * k).sum()), 1e-12))


@dataclass(frozen=True)
class SweepResult:
    fits: tuple
    splittings: np.ndarray
    ssr: np.ndarray
    bound: float                # splitting where ssr doubles, interpolated
    min_ssr: float


def fit_double_sweep(
    spec: Spectrum, splittings, sigma_floor: float = DEFAULT_SIGMA_FLOOR
) -> SweepResult:
    """Equal-amplitude symmetric-pair fits over a fixed-splitting sweep.

    For each splitting the model is two Gaussians of common width and half
    amplitude each, symmetric about a fitted center.  The returned bound is
    the smallest splitting at which the residual sum doubles relative to
    the sweep minimum, located by linear interpolation.
    """
    s = np.asarray(splittings, dtype=float)
    if s.size < 2 or np.any(np.diff(s) <= 0):
        raise ValueError("splittings must be ascending with >= 2 entries")
    if s[0] != 0.0:
        raise ValueError("splittings must include 0")
    kernel = spectrum_kernel(spec)
    sigma_r = (
        response_sigma(spec.response_fwhm)
        if spec.response_kernel is None
        else _sampled_sigma(spec)
    )
    base_fit = fit_single(spec, sigma_floor)
    fits = []
    ssr = np.empty(s.size)
    for j, split in enumerate(s):
        p0 = (
            base_fit.amplitude,
            base_fit.center,
            max(math.sqrt(max(base_fit.sigma**2 - split**2 / 4.0, sigma_floor**2)),
                sigma_floor),
            base_fit.baseline,
        )
        p, e, conv, it = _lm_fit(spec.freq, spec.counts, kernel, p0, split, sigma_floor)
        fits.append(
            FitResult(
                amplitude=float(p[0]), center=float(p[1]), sigma=float(p[2]),
                baseline=float(p[3]), splitting=float(split), ssr=e,
                converged=conv, iterations=it,
                at_sigma_floor=bool(p[2] <= sigma_floor * (1 + 1e-12)),
            )
        )
        ssr[j] = e
    min_ssr = float(ssr.min())
    target = 2.0 * min_ssr
    j_min = int(ssr.argmin())
    bound = None
    for j in range(j_min + 1, s.size):
        if ssr[j] >= target:
            s0, s1 = s[j - 1], s[j]
            e0, e1 = ssr[j - 1], ssr[j]
            bound = s0 + (target - e0) * (s1 - s0) / (e1 - e0)
            break
    if bound is None:
        raise ValueError("sweep too short: residual sum never doubles")
    return SweepResult(
        fits=tuple(fits), splittings=s, ssr=ssr, bound=float(bound), min_ssr=min_ssr
    )


@dataclass(frozen=True)
class UpsilonBound:
    value: float
    clamped: bool


def upsilon_bound(splitting_bound: float, consts: PhysicalConstants) -> UpsilonBound:
    """Distortion-energy bound implied by a zero-field splitting bound."""
    gap = splitting_bound**2 - consts.lambda_par**2
    if gap <= 0:
        return UpsilonBound(value=0.0, clamped=True)
    return UpsilonBound(value=math.sqrt(gap) / 2.0, clamped=False)


def synth_spectrum(
    sigma: float = 16.0,
    center: float = 0.0,
    amplitude: float = 1000.0,
    baseline: float = 0.0,
    splitting: float = 0.0,
    response_fwhm: float = DEFAULT_RESPONSE_FWHM,
    snr: float | None = None,
    seed: int = 0,
    span: float | None = None,
    n_points: int = 401,
) -> Spectrum:
    """Synthetic response-convolved spectrum, optionally with noise.

    snr is peak counts over noise standard deviation (white Gaussian); None
    means noiseless.  The default span covers six total widths each side.
    """
    sigma_r = response_sigma(response_fwhm)
    total = math.sqrt(sigma**2 + sigma_r**2)
    if span is None:
        span = 6.0 * total + splitting
    x = np.linspace(center - span, center + span, n_points)
    dx = x[1] - x[0]
    kernel = _kernel(dx, sigma_r)
    y = np.zeros_like(x)
    for off in (-0.5 * splitting, +0.5 * splitting):
        y += gaussian(x, amplitude / 2.0, center + off, sigma)
    y = convolve_response(y, kernel) + baseline
    if snr is not None:
        if snr <= 0:
            raise ValueError("snr must be positive")
        rng = np.random.default_rng(seed)
        y = y + rng.normal(scale=float(y.max() - baseline) / snr, size=y.size)
    return Spectrum(freq=x, counts=y, response_fwhm=response_fwhm)


def read_spectrum_csv(path, response_fwhm: float = DEFAULT_RESPONSE_FWHM) -> Spectrum:
    """Two-column (frequency_GHz, counts) CSV; optional third sampled-response
    column overrides the Gaussian response width."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                rows.append([float(v) for v in parts])
            except ValueError:
                continue        # header line
    if not rows:
        raise ValueError(f"no numeric rows in {path}")
    data = np.array(rows)
    if data.shape[1] == 2:
        return Spectrum.from_samples(data[:, 0], data[:, 1], response_fwhm=response_fwhm)
    if data.shape[1] == 3:
        return Spectrum.from_samples(
            data[:, 0], data[:, 1], response_fwhm=None, response_kernel=data[:, 2]
        )
    raise ValueError("expected 2 or 3 columns")
