"""Biphoton envelope and Glauber correlations with two-photon beating."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_DELTA = 2 * np.pi * 100e6  # rad/s, AOM shift
DEFAULT_BANDWIDTH = 20e6  # Hz
BELL_THRESHOLD = 1 / np.sqrt(2)

SHAPES = ("exponential",)


@dataclass(frozen=True)
class BiphotonWaveform:
    """Parametric psi_0(tau): |psi_0|^2 = amplitude^2 exp(-gamma tau) for tau >= 0.

    The intensity decay rate ``gamma`` equals the FWHM (rad/s) of the
    Lorentzian biphoton spectrum.
    """

    gamma: float = 2 * np.pi * DEFAULT_BANDWIDTH
    shape: str = "exponential"
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.shape not in SHAPES:
            raise ValueError(f"unknown envelope shape {self.shape!r}; known: {SHAPES}")

    @classmethod
    def from_bandwidth(cls, fwhm_hz: float, amplitude: float = 1.0) -> "BiphotonWaveform":
        return cls(gamma=2 * np.pi * fwhm_hz, amplitude=amplitude)

    @property
    def bandwidth(self) -> float:
        """Spectral FWHM in Hz."""
        return self.gamma / (2 * np.pi)

    def psi0(self, tau):
        tau = np.asarray(tau, dtype=float)
        with np.errstate(over="ignore"):
            env = self.amplitude * np.exp(-0.5 * self.gamma * np.where(tau >= 0, tau, 0.0))
        return np.where(tau >= 0, env, 0.0)


@dataclass(frozen=True)
class BeatParameters:
    c1: complex
    c2: complex
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.c1 == 0 and self.c2 == 0:
            raise ValueError("branch amplitudes are both zero")

    @classmethod
    def from_angles(cls, theta: float, phi: float, delta: float = DEFAULT_DELTA) -> "BeatParameters":
        """Amplitudes (cos phi, sin phi e^{i theta})/(2 sqrt 2) of the projected state."""
        k = 1 / (2 * np.sqrt(2))
        return cls(k * np.cos(phi), k * np.sin(phi) * np.exp(1j * theta), delta)

    @property
    def theta(self) -> float:
        """Relative branch phase arg(c2/c1), in [0, 2pi)."""
        return float(np.mod(np.angle(self.c2 * np.conj(self.c1)), 2 * np.pi))

    @property
    def contrast(self) -> float:
        """Visibility of the normalized beating, 2|c1 c2|/(|c1|^2+|c2|^2)."""
        a, b = abs(self.c1), abs(self.c2)
        return 2 * a * b / (a * a + b * b)


def g0(w: BiphotonWaveform, tau):
    """G0(tau) = |psi_0(tau)|^2; zero for tau < 0."""
    return np.abs(w.psi0(tau)) ** 2


def g56(w: BiphotonWaveform, p: BeatParameters, tau):
    """G0(|tau|) |c1 + c2 exp(-i delta |tau|)|^2."""
    t = np.abs(np.asarray(tau, dtype=float))
    beat = np.abs(p.c1 + p.c2 * np.exp(-1j * p.delta * t)) ** 2
    return g0(w, t) * beat


def g56_closed_form(w: BiphotonWaveform, theta: float, phi: float, tau, delta: float = DEFAULT_DELTA):
    """(1/8) G0(|tau|) [1 + sin(2 phi) cos(delta |tau| - theta)]."""
    t = np.abs(np.asarray(tau, dtype=float))
    return g0(w, t) * (1 + np.sin(2 * phi) * np.cos(delta * t - theta)) / 8


def visibility(phi: float) -> float:
    return float(abs(np.sin(2 * phi)))


def bell_threshold_check(v: float) -> bool:
    """Whether visibility ``v`` strictly exceeds 1/sqrt(2)."""
    return bool(v > BELL_THRESHOLD)
