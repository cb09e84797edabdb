"""Two-photon states over (port, polarization, frequency-bin) modes.

A state is a map from unordered mode pairs to amplitudes, i.e. the
coefficients of a_m^dagger a_n^dagger |0>.  Linear optical elements act photon
by photon through single-mode maps and the products are re-collected.

Port topology: 1, 2 before the beam splitter; 3, 4 after it; 5, 6 after the
polarizers P3 (on port 3) and P4 (on port 4).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Tuple

import numpy as np

from . import polarization as pol

PRUNE_TOL = 1e-15
POLARIZATIONS = ("H", "V")


class Species(enum.Enum):
    STOKES = "s"
    ANTI_STOKES = "as"


@dataclass(frozen=True)
class FrequencyBin:
    species: Species
    shifted: bool = False

    def shift(self) -> "FrequencyBin":
        if self.shifted:
            raise ValueError(f"{self} already carries the AOM shift")
        return FrequencyBin(self.species, True)

    def __str__(self):
        return f"w_{self.species.value}" + ("+d" if self.shifted else "")


STOKES = FrequencyBin(Species.STOKES)
ANTI_STOKES = FrequencyBin(Species.ANTI_STOKES)


@dataclass(frozen=True)
class PhotonMode:
    port: int
    polarization: str
    frequency: FrequencyBin

    def __post_init__(self):
        if self.port not in (1, 2, 3, 4, 5, 6):
            raise ValueError(f"unknown port {self.port}")
        if self.polarization not in POLARIZATIONS:
            raise ValueError(f"polarization must be 'H' or 'V', got {self.polarization!r}")

    def sort_key(self):
        return (self.port, self.polarization, self.frequency.species.value, self.frequency.shifted)

    def replace(self, **kw) -> "PhotonMode":
        fields = dict(port=self.port, polarization=self.polarization, frequency=self.frequency)
        fields.update(kw)
        return PhotonMode(**fields)

    def __str__(self):
        return f"|{self.polarization},{self.frequency}>_{self.port}"


Pair = Tuple[PhotonMode, PhotonMode]
ModeMap = Callable[[PhotonMode], Iterable[Tuple[PhotonMode, complex]]]


def _pair(a: PhotonMode, b: PhotonMode) -> Pair:
    return (a, b) if a.sort_key() <= b.sort_key() else (b, a)


@dataclass(frozen=True)
class TwoPhotonState:
    terms: Mapping[Pair, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean: Dict[Pair, complex] = {}
        for (a, b), amp in self.terms.items():
            key = _pair(a, b)
            clean[key] = clean.get(key, 0j) + complex(amp)
        clean = {k: v for k, v in clean.items() if abs(v) >= PRUNE_TOL}
        object.__setattr__(self, "terms", clean)

    def __len__(self):
        return len(self.terms)

    def amplitude(self, a: PhotonMode, b: PhotonMode) -> complex:
        return self.terms.get(_pair(a, b), 0j)

    def norm2(self) -> float:
        # a doubly occupied mode has <0|a^2 a^dag^2|0> = 2
        return float(sum(abs(c) ** 2 * (2 if a == b else 1) for (a, b), c in self.terms.items()))

    def ports(self) -> set:
        return {m.port for pair in self.terms for m in pair}

    def sector(self, port_a: int, port_b: int) -> "TwoPhotonState":
        """Terms with one photon on ``port_a`` and one on ``port_b``."""
        want = sorted((port_a, port_b))
        return TwoPhotonState(
            {k: v for k, v in self.terms.items() if sorted((k[0].port, k[1].port)) == want}
        )

    def scaled(self, factor: complex) -> "TwoPhotonState":
        return TwoPhotonState({k: factor * v for k, v in self.terms.items()})

    def map_modes(self, fn: ModeMap) -> "TwoPhotonState":
        """Apply a single-photon linear map to both photons."""
        out: Dict[Pair, complex] = {}
        for (a, b), amp in self.terms.items():
            for ma, ca in fn(a):
                for mb, cb in fn(b):
                    key = _pair(ma, mb)
                    out[key] = out.get(key, 0j) + amp * ca * cb
        return TwoPhotonState(out)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c:.4g}){a}{b}" for (a, b), c in self.terms.items())


def _require_ports(state: TwoPhotonState, allowed: set, what: str):
    bad = state.ports() - allowed
    if bad:
        raise ValueError(f"{what} expects modes on ports {sorted(allowed)}, found {sorted(bad)}")


def jones_on_port(port: int, op: pol.JonesOperator, new_port: int | None = None) -> ModeMap:
    """Mode map applying a Jones operator to photons on ``port`` (others untouched)."""
    target = port if new_port is None else new_port
    m = op.matrix

    def fn(mode: PhotonMode):
        if mode.port != port:
            return [(mode, 1.0)]
        j = POLARIZATIONS.index(mode.polarization)
        return [
            (mode.replace(port=target, polarization=q), m[i, j])
            for i, q in enumerate(POLARIZATIONS)
            if m[i, j] != 0
        ]

    return fn


def aom_shift(port: int) -> ModeMap:
    """Ideal frequency shifter: relabels the bin, no loss, no phase."""

    def fn(mode: PhotonMode):
        if mode.port != port:
            return [(mode, 1.0)]
        return [(mode.replace(frequency=mode.frequency.shift()), 1.0)]

    return fn


def species_phase(port: int, species: Species, phase: float) -> ModeMap:
    """Phase e^{i phase} on photons of one species in one path."""
    factor = np.exp(1j * phase)

    def fn(mode: PhotonMode):
        if mode.port == port and mode.frequency.species == species:
            return [(mode, factor)]
        return [(mode, 1.0)]

    return fn


def raw_pair(normalized: bool = True) -> TwoPhotonState:
    """Exchange-symmetric Stokes/anti-Stokes pair in paths 1 and 2, both H."""
    amp = 1 / np.sqrt(2) if normalized else 1.0
    return TwoPhotonState(
        {
            (PhotonMode(1, "H", STOKES), PhotonMode(2, "H", ANTI_STOKES)): amp,
            (PhotonMode(1, "H", ANTI_STOKES), PhotonMode(2, "H", STOKES)): amp,
        }
    )


def source_state(normalized: bool = True, path_phase: float = 0.0) -> TwoPhotonState:
    """The |HV> (x) (|w_s+d>_1|w_as>_2 + |w_as+d>_1|w_s>_2) pair entering the beam splitter.

    ``normalized=False`` keeps unit amplitudes on both exchange terms, which
    is the normalization the downstream amplitude prefactors (1/2 after the
    beam splitter, 1/(2 sqrt 2) after projection) refer to.

    ``path_phase`` is an extra phase picked up by the anti-Stokes photon in
    path 1 relative to the Stokes one, as an unequal path length would give.
    """
    state = raw_pair(normalized)
    state = state.map_modes(jones_on_port(1, pol.projector(pol.H)))
    state = state.map_modes(jones_on_port(2, pol.projector(pol.H)))
    state = state.map_modes(aom_shift(1))
    state = state.map_modes(jones_on_port(2, pol.hwp(np.pi / 4)))
    if path_phase:
        state = state.map_modes(species_phase(1, Species.ANTI_STOKES, path_phase))
    return state


_S = 1 / np.sqrt(2)
# (input port, polarization) -> [(output port, coefficient)].  The H and V rows
# follow a3 = (a1H - i a2V)/sqrt2, a4 = (i a1H + a2V)/sqrt2; the unused
# (1V, 2H) inputs are completed so each polarization block is unitary.
BEAMSPLITTER = {
    (1, "H"): [(3, _S), (4, 1j * _S)],
    (2, "H"): [(3, 1j * _S), (4, _S)],
    (1, "V"): [(3, _S), (4, -1j * _S)],
    (2, "V"): [(3, -1j * _S), (4, _S)],
}


def _beamsplitter_map(mode: PhotonMode):
    return [(mode.replace(port=p), c) for p, c in BEAMSPLITTER[(mode.port, mode.polarization)]]


def apply_beamsplitter(s: TwoPhotonState) -> TwoPhotonState:
    _require_ports(s, {1, 2}, "beam splitter")
    return s.map_modes(_beamsplitter_map)


@dataclass(frozen=True)
class ProjectionConfig:
    """Phase ``theta`` of P3 and amplitude angle ``phi`` of P4.

    P4 is the linear polarizer with <P4|H> = sin(phi), <P4|V> = cos(phi), so
    that the shifted-Stokes branch carries cos(phi) and the shifted-anti-Stokes
    branch sin(phi) e^{i theta}.  At phi = pi/4 this is |↗>.
    """

    theta: float
    phi: float = np.pi / 4

    def __post_init__(self):
        object.__setattr__(self, "theta", float(np.mod(self.theta, 2 * np.pi)))
        if not -1e-12 <= self.phi <= np.pi / 2 + 1e-12:
            raise ValueError(f"phi must lie in [0, pi/2], got {self.phi}")

    def p3(self) -> pol.PolarizationState:
        return pol.complex_polarizer_state(self.theta)

    def p4(self) -> pol.PolarizationState:
        return pol.linear(np.pi / 2 - self.phi)


def apply_projection(s: TwoPhotonState, cfg: ProjectionConfig) -> TwoPhotonState:
    """T3 = |H><P3| on port 3 -> 5 and T4 = |H><P4| on port 4 -> 6; output unnormalized."""
    _require_ports(s, {3, 4}, "projection")
    s = s.map_modes(jones_on_port(3, pol.projector(cfg.p3()), new_port=5))
    return s.map_modes(jones_on_port(4, pol.projector(cfg.p4()), new_port=6))


def frequency_bin_state(
    cfg: ProjectionConfig, normalized: bool = False, path_phase: float = 0.0
) -> TwoPhotonState:
    """Source -> beam splitter -> polarizers, all sectors kept."""
    return apply_projection(apply_beamsplitter(source_state(normalized, path_phase)), cfg)


def branch_amplitudes(s: TwoPhotonState, stokes_port: int = 5) -> Tuple[complex, complex]:
    """(c1, c2) for the |w_s+d, w_as> and |w_s, w_as+d> branches.

    Only coincidences with the Stokes photon on ``stokes_port`` (5 or 6) and
    the anti-Stokes photon on the other output are considered; same-port terms
    and the opposite time ordering are ignored.  A branch removed by the
    polarizer (phi = 0 or pi/2) is returned as 0.
    """
    if stokes_port not in (5, 6):
        raise ValueError("stokes_port must be 5 or 6")
    _require_ports(s, {5, 6}, "branch_amplitudes")
    other = 11 - stokes_port
    found: List[Tuple[bool, complex]] = []
    for (a, b), amp in s.terms.items():
        if a.port == b.port:
            continue
        stokes, anti = (a, b) if a.frequency.species == Species.STOKES else (b, a)
        if stokes.frequency.species != Species.STOKES or anti.frequency.species != Species.ANTI_STOKES:
            raise ValueError(f"term {a}{b} is not a Stokes/anti-Stokes pair")
        if stokes.port != stokes_port:
            continue
        if anti.port != other or a.polarization != "H" or b.polarization != "H":
            raise ValueError(f"unexpected term {a}{b} after projection")
        if stokes.frequency.shifted == anti.frequency.shifted:
            raise ValueError(f"term {a}{b} does not carry exactly one shift")
        found.append((stokes.frequency.shifted, amp))
    # a branch may be absent (pruned zero amplitude), but never duplicated
    if not 1 <= len(found) <= 2 or len({shifted for shifted, _ in found}) != len(found):
        raise ValueError(f"expected at most one term per branch, found {len(found)} terms")
    amps = dict(found)
    return amps.get(True, 0j), amps.get(False, 0j)
