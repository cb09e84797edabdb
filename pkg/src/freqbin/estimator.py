"""Recover the frequency-bin phase and visibility from coincidence histograms.

The beating histogram is divided bin by bin by the envelope reference and the
ratio is fitted to A [1 + V cos(delta |tau| - theta)] through the linear model
A + B cos(delta |tau|) + C sin(delta |tau|).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from . import twophoton as tp
from .correlation import (
    DEFAULT_DELTA,
    BeatParameters,
    BiphotonWaveform,
    bell_threshold_check,
    g56,
)
from .polarization import phase_of_t3
from .montecarlo import (
    AcquisitionConfig,
    CoincidenceHistogram,
    simulate_histogram,
    simulate_reference,
)


class FitError(ValueError):
    """The beating fit cannot be carried out (too few points, singular system, A <= 0)."""


@dataclass(frozen=True)
class NormalizedBeating:
    tau: np.ndarray
    ratio: np.ndarray
    sigma: np.ndarray
    # width of the histogram bins the ratio was averaged over; None for point samples
    bin_width: Optional[float] = None
    # local d ln G0 / d|tau| inside each bin, used to weight the bin average
    envelope_slope: Optional[np.ndarray] = None

    def __post_init__(self):
        arrays = [np.asarray(a, dtype=float) for a in (self.tau, self.ratio, self.sigma)]
        if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 1:
            raise ValueError("tau, ratio and sigma must be 1-d and of equal length")
        if np.any(arrays[2] <= 0):
            raise ValueError("sigma must be positive")
        for name, a in zip(("tau", "ratio", "sigma"), arrays):
            object.__setattr__(self, name, a)
        if self.envelope_slope is not None:
            slope = np.asarray(self.envelope_slope, dtype=float)
            if slope.shape != arrays[0].shape:
                raise ValueError("envelope_slope must match tau")
            object.__setattr__(self, "envelope_slope", slope)

    def __len__(self):
        return self.tau.size


def normalize(
    beat: CoincidenceHistogram, ref: CoincidenceHistogram, min_ref_count: int = 10
) -> NormalizedBeating:
    """Bin-by-bin ratio beat/ref over bins with at least ``min_ref_count`` reference counts.

    Errors follow the first-order propagation of independent Poisson counts,
    var = b/r^2 + b^2/r^3, with the numerator variance floored at one count so
    empty beating bins keep a finite weight.
    """
    if not beat.same_binning(ref):
        raise ValueError("beating and reference histograms have different binning")
    keep = ref.counts >= max(min_ref_count, 1)
    if not np.any(keep):
        raise ValueError(f"no bin has at least {min_ref_count} reference counts")
    b = beat.counts[keep].astype(float)
    r = ref.counts[keep].astype(float)
    ratio = b / r
    var = np.maximum(b, 1.0) / r**2 + b**2 / r**3
    widths = beat.widths[keep]
    if not np.allclose(widths, widths[0], rtol=1e-9):
        return NormalizedBeating(beat.centers[keep], ratio, np.sqrt(var))
    slope = local_log_slope(ref)[keep]
    return NormalizedBeating(beat.centers[keep], ratio, np.sqrt(var), float(widths[0]), slope)


def local_log_slope(ref: CoincidenceHistogram, half_width: int = 3) -> np.ndarray:
    """Count-weighted slope of ln(ref) against |tau| over nearby bins on the same side of zero."""
    tau = ref.centers
    t = np.abs(tau)
    counts = ref.counts.astype(float)
    side = np.sign(tau)
    out = np.zeros_like(t)
    for i in range(t.size):
        lo, hi = max(i - half_width, 0), min(i + half_width + 1, t.size)
        sel = np.arange(lo, hi)
        sel = sel[(side[sel] == side[i]) & (counts[sel] > 0)]
        if sel.size < 3:
            continue
        w = counts[sel]
        x = t[sel] - np.average(t[sel], weights=w)
        y = np.log(counts[sel])
        denom = np.sum(w * x * x)
        if denom > 0:
            out[i] = np.sum(w * x * y) / denom
    return out


@dataclass(frozen=True)
class BeatFit:
    theta_hat: float
    v_hat: float
    a_hat: float
    theta_sigma: float
    v_sigma: float
    chi2_reduced: float
    n_points: int
    coef: Tuple[float, float, float] = (0.0, 0.0, 0.0)  # (A, B, C)
    cov: np.ndarray = field(default=None, repr=False)
    degenerate: bool = False

    @property
    def bell_violation(self) -> bool:
        return bell_threshold_check(self.v_hat)

    def model(self, tau, delta: float):
        """A [1 + V cos(delta |tau| - theta)] at the fitted values."""
        t = np.abs(np.asarray(tau, dtype=float))
        return self.a_hat * (1 + self.v_hat * np.cos(delta * t - self.theta_hat))

    def linear_model(self, tau, delta: float):
        t = np.abs(np.asarray(tau, dtype=float))
        a, b, c = self.coef
        return a + b * np.cos(delta * t) + c * np.sin(delta * t)


def _sinhc(x):
    x = np.asarray(x, dtype=complex)
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, x)
    return np.where(small, 1 + x * x / 6, np.sinh(safe) / safe)


def _design(nb: NormalizedBeating, delta: float) -> np.ndarray:
    t = np.abs(nb.tau)
    phasor = np.exp(1j * delta * t)
    if nb.bin_width:
        # average of e^{i delta |tau|} over the bin under a locally exponential envelope;
        # damps the beat by ~sinc(delta w/2) and shifts its phase by ~slope*delta*w^2/12
        kappa = np.zeros_like(t) if nb.envelope_slope is None else nb.envelope_slope
        half = 0.5 * nb.bin_width
        phasor = phasor * _sinhc((kappa + 1j * delta) * half) / _sinhc(kappa * half)
    return np.column_stack([np.ones_like(t), phasor.real, phasor.imag])


def fit_beating(nb: NormalizedBeating, delta: float = DEFAULT_DELTA) -> BeatFit:
    """Weighted linear least squares for (A, B, C), reparameterized to (A, V, theta).

    ``delta`` is the known AOM shift and is not fitted.  A fit whose contrast
    is not resolved (V_hat below twice its error) is flagged ``degenerate`` and
    its phase error set to pi.
    """
    if len(nb) < 3:
        raise FitError(f"need at least 3 points, got {len(nb)}")
    t = np.abs(nb.tau)
    if t.max() - t.min() < 2 * np.pi / delta:
        raise FitError("points span less than one beat period")
    X = _design(nb, delta)
    w = 1 / nb.sigma
    Xw = X * w[:, None]
    yw = nb.ratio * w
    normal = Xw.T @ Xw
    if np.linalg.cond(normal) > 1e12:
        raise FitError("singular normal equations")
    cov = np.linalg.inv(normal)
    coef = cov @ (Xw.T @ yw)
    a, b, c = coef
    if a <= 0:
        raise FitError(f"fitted envelope scale A = {a:.3g} is not positive")

    resid = yw - Xw @ coef
    dof = max(len(nb) - 3, 1)
    chi2_red = float(resid @ resid / dof)

    rho = np.hypot(b, c)
    v = rho / a
    theta = float(np.mod(np.arctan2(c, b), 2 * np.pi))
    if rho > 0:
        jac_v = np.array([-v / a, b / (a * rho), c / (a * rho)])
        jac_t = np.array([0.0, -c / rho**2, b / rho**2])
        v_sigma = float(np.sqrt(jac_v @ cov @ jac_v))
        theta_sigma = float(np.sqrt(jac_t @ cov @ jac_t))
    else:
        v_sigma = float(np.sqrt(cov[1, 1] + cov[2, 2]) / a)
        theta_sigma = np.pi
    degenerate = bool(v <= 2 * v_sigma)
    if degenerate:
        theta_sigma = np.pi
    return BeatFit(
        theta_hat=theta,
        v_hat=float(v),
        a_hat=float(a),
        theta_sigma=theta_sigma,
        v_sigma=v_sigma,
        chi2_reduced=chi2_red,
        n_points=len(nb),
        coef=(float(a), float(b), float(c)),
        cov=cov,
        degenerate=degenerate,
    )


def fit_report(fit: BeatFit) -> dict:
    return {
        "theta_hat_rad": fit.theta_hat,
        "theta_hat_over_pi": fit.theta_hat / np.pi,
        "theta_sigma": fit.theta_sigma,
        "v_hat": fit.v_hat,
        "v_sigma": fit.v_sigma,
        "a_hat": fit.a_hat,
        "chi2_reduced": fit.chi2_reduced,
        "n_points": fit.n_points,
        "bell_violation": fit.bell_violation,
    }


@dataclass(frozen=True)
class PipelineConfig:
    """Everything except the phase needed to go from source to fitted beating."""

    phi: float = np.pi / 4
    delta: float = DEFAULT_DELTA
    waveform: BiphotonWaveform = field(default_factory=BiphotonWaveform)
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    min_ref_count: int = 10
    path_phase: float = 0.0


class PipelineRun(NamedTuple):
    beat: CoincidenceHistogram
    reference: CoincidenceHistogram
    normalized: NormalizedBeating
    fit: BeatFit
    params: BeatParameters


def beat_parameters(theta: float, cfg: PipelineConfig) -> BeatParameters:
    """Branch amplitudes from the full optical pipeline (Stokes photon on port 5)."""
    state = tp.frequency_bin_state(
        tp.ProjectionConfig(theta, cfg.phi), normalized=False, path_phase=cfg.path_phase
    )
    c1, c2 = tp.branch_amplitudes(state)
    return BeatParameters(c1, c2, cfg.delta)


def run_pipeline(theta: float, cfg: PipelineConfig, seed: Optional[int] = None) -> PipelineRun:
    """Simulate reference and beating histograms, normalize and fit them."""
    acq = cfg.acquisition if seed is None else replace(cfg.acquisition, seed=seed)
    params = beat_parameters(theta, cfg)
    beat = simulate_histogram(lambda t: g56(cfg.waveform, params, t), acq)
    ref = simulate_reference(cfg.waveform, acq)
    nb = normalize(beat, ref, cfg.min_ref_count)
    return PipelineRun(beat, ref, nb, fit_beating(nb, cfg.delta), params)


class SweepPoint(NamedTuple):
    beta: float
    theta_hat: float
    theta_sigma: float
    error: Optional[str] = None


def sweep_beta(
    betas: Sequence[float], cfg: PipelineConfig, errors: str = "raise"
) -> List[SweepPoint]:
    """Run the pipeline with P3 set by a HWP at each ``beta``.

    Run ``i`` uses seed ``acquisition.seed + i``, so a one-element sweep is
    the same as a single :func:`run_pipeline` call.  With ``errors="record"``
    a failed run yields NaNs and its message instead of raising.
    """
    if errors not in ("raise", "record"):
        raise ValueError("errors must be 'raise' or 'record'")
    out = []
    for i, beta in enumerate(betas):
        seed = (cfg.acquisition.seed + i) % 2**64
        try:
            fit = run_pipeline(phase_of_t3(beta), cfg, seed=seed).fit
        except ValueError as exc:
            if errors == "raise":
                raise
            out.append(SweepPoint(float(beta), np.nan, np.nan, str(exc)))
            continue
        out.append(SweepPoint(float(beta), fit.theta_hat, fit.theta_sigma))
    return out


def unwrap_phases(theta: Sequence[float]) -> np.ndarray:
    """Continue each phase onto the 2pi-branch nearest its predecessor."""
    return np.unwrap(np.asarray(theta, dtype=float))


class PhaseLine(NamedTuple):
    slope: float
    intercept: float  # wrapped to (-pi, pi]
    slope_stderr: float
    intercept_stderr: float


def fit_phase_line(betas: Sequence[float], theta_hat: Sequence[float]) -> PhaseLine:
    """Straight-line regression of unwrapped phase on beta (failed NaN rows skipped)."""
    betas = np.asarray(betas, dtype=float)
    theta_hat = np.asarray(theta_hat, dtype=float)
    ok = np.isfinite(theta_hat)
    if ok.sum() < 3:
        raise FitError("need at least 3 successful sweep points")
    res = stats.linregress(betas[ok], unwrap_phases(theta_hat[ok]))
    intercept = float(np.pi - np.mod(np.pi - res.intercept, 2 * np.pi))
    return PhaseLine(float(res.slope), intercept, float(res.stderr), float(res.intercept_stderr))
