"""Jones calculus for waveplates and projectors, plus Poincare-sphere geometry.

Conventions: Jones vectors are in the {H, V} basis, the wave is viewed from
the source, and |R> = (|H> + i|V>)/sqrt(2) sits at the north pole (S3 = +1).
Waveplates are rotation-conjugated retarders R(-eta) diag(1, e^{i*retardance}) R(eta).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PHASE_TOL = 1e-10
NORM_TOL = 1e-12


def _rotation(eta: float) -> np.ndarray:
    c, s = np.cos(eta), np.sin(eta)
    return np.array([[c, s], [-s, c]], dtype=complex)


def _equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    # align b to a with the best global phase, then compare
    overlap = np.vdot(b, a)
    if abs(overlap) < tol:
        return bool(np.linalg.norm(a) < tol and np.linalg.norm(b) < tol)
    phase = overlap / abs(overlap)
    return bool(np.max(np.abs(a - phase * b)) < tol)


@dataclass(frozen=True, eq=False)
class PolarizationState:
    """Normalized Jones vector (c_H, c_V).

    Equality (``==``) is taken up to a global phase with tolerance
    ``PHASE_TOL``; states are therefore unhashable.
    """

    c_h: complex
    c_v: complex

    def __post_init__(self):
        norm2 = abs(self.c_h) ** 2 + abs(self.c_v) ** 2
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"polarization state not normalized: |c|^2 = {norm2!r}")

    @classmethod
    def from_vector(cls, vec, normalize: bool = False) -> "PolarizationState":
        vec = np.asarray(vec, dtype=complex).ravel()
        if vec.shape != (2,):
            raise ValueError("Jones vector must have two components")
        if normalize:
            n = np.linalg.norm(vec)
            if n == 0:
                raise ValueError("cannot normalize the zero vector")
            vec = vec / n
        return cls(complex(vec[0]), complex(vec[1]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c_h, self.c_v], dtype=complex)

    def same_state(self, other: "PolarizationState", tol: float = PHASE_TOL) -> bool:
        return _equal_up_to_phase(self.vector, other.vector, tol)

    def __eq__(self, other):
        if not isinstance(other, PolarizationState):
            return NotImplemented
        return self.same_state(other)

    __hash__ = None


def linear(angle: float) -> PolarizationState:
    """Linear polarization at ``angle`` from the H axis."""
    return PolarizationState(complex(np.cos(angle)), complex(np.sin(angle)))


H = PolarizationState(1.0 + 0j, 0j)
V = PolarizationState(0j, 1.0 + 0j)
D = PolarizationState.from_vector([1, 1], normalize=True)  # |↗>
A = PolarizationState.from_vector([1, -1], normalize=True)  # |↘>
R = PolarizationState.from_vector([1, 1j], normalize=True)
L = PolarizationState.from_vector([1, -1j], normalize=True)


def complex_polarizer_state(theta: float) -> PolarizationState:
    """(|H> + e^{-i theta}|V>)/sqrt(2), the state selected by a phase-theta polarizer."""
    return PolarizationState.from_vector([1.0, np.exp(-1j * theta)], normalize=True)


@dataclass(frozen=True, eq=False)
class JonesOperator:
    """A 2x2 complex Jones matrix acting on polarization states."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"Jones matrix must be 2x2, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other):
        if isinstance(other, JonesOperator):
            return JonesOperator(self.matrix @ other.matrix)
        if isinstance(other, PolarizationState):
            # output of a projector is generally unnormalized
            return self.matrix @ other.vector
        return self.matrix @ np.asarray(other, dtype=complex)

    def apply(self, state: PolarizationState) -> PolarizationState:
        """Apply and renormalize; raises if the state is annihilated."""
        out = self.matrix @ state.vector
        if np.linalg.norm(out) < NORM_TOL:
            raise ValueError("state annihilated by operator")
        return PolarizationState.from_vector(out, normalize=True)

    def equiv(self, other: "JonesOperator", tol: float = PHASE_TOL) -> bool:
        """Operator equality up to a global phase."""
        return _equal_up_to_phase(self.matrix, other.matrix, tol)

    def unitarity_error(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(2))))

    def is_unitary(self, tol: float = NORM_TOL) -> bool:
        return self.unitarity_error() < tol

    def is_projector(self, tol: float = PHASE_TOL) -> bool:
        """True if M @ M = lam * M for some complex lam (rank-1 idempotent up to scale)."""
        # for rank-1 M = u v^dagger the scale is v^dagger u = trace(M)
        m = self.matrix
        return bool(np.max(np.abs(m @ m - np.trace(m) * m)) < tol)


IDENTITY = JonesOperator(np.eye(2))


def retarder(eta: float, retardance: float) -> JonesOperator:
    """Linear retarder with fast axis at ``eta`` to H."""
    core = np.diag([1.0, np.exp(1j * retardance)])
    return JonesOperator(_rotation(-eta) @ core @ _rotation(eta))


def hwp(eta: float) -> JonesOperator:
    return retarder(eta, np.pi)


def qwp(eta: float) -> JonesOperator:
    return retarder(eta, np.pi / 2)


def projector(p: PolarizationState) -> JonesOperator:
    """|H><p|: pass ``p`` and emit it as H, as a waveplate pair followed by a PBS does."""
    return JonesOperator(np.outer(H.vector, p.vector.conj()))


PBS_H = projector(H)


@dataclass(frozen=True)
class PoincarePoint:
    s1: float
    s2: float
    s3: float

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.s1, self.s2, self.s3])

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def to_poincare(p: PolarizationState) -> PoincarePoint:
    ch, cv = p.c_h, p.c_v
    cross = np.conj(ch) * cv
    return PoincarePoint(
        float(abs(ch) ** 2 - abs(cv) ** 2),
        float(2 * cross.real),
        float(2 * cross.imag),
    )


def from_poincare(point: PoincarePoint) -> PolarizationState:
    """Inverse of :func:`to_poincare`, choosing c_H real and non-negative."""
    v = point.vector
    n = np.linalg.norm(v)
    if abs(n - 1.0) > 1e-9:
        raise ValueError(f"not a pure state: |S| = {n}")
    s1, s2, s3 = v / n
    polar = np.arccos(np.clip(s1, -1.0, 1.0))
    azimuth = np.arctan2(s3, s2)
    return PolarizationState.from_vector(
        [np.cos(polar / 2), np.exp(1j * azimuth) * np.sin(polar / 2)], normalize=True
    )


@dataclass(frozen=True)
class WaveplateSetting:
    """Fast-axis angles (radians from H) of the QWP and HWP, each reduced to [0, pi)."""

    qwp_angle: float
    hwp_angle: float

    def __post_init__(self):
        object.__setattr__(self, "qwp_angle", float(np.mod(self.qwp_angle, np.pi)))
        object.__setattr__(self, "hwp_angle", float(np.mod(self.hwp_angle, np.pi)))

    def operator(self) -> JonesOperator:
        """The waveplate pair: light meets the QWP first, then the HWP."""
        return hwp(self.hwp_angle) @ qwp(self.qwp_angle)

    def polarizer(self) -> JonesOperator:
        """Waveplate pair followed by the H port of a PBS."""
        return PBS_H @ self.operator()


def solve_waveplates(theta: float) -> WaveplateSetting:
    """Waveplate angles that project onto (|H> + e^{-i theta}|V>)/sqrt(2).

    The QWP at pi/4 rotates the target onto the equator at longitude
    theta + pi/2; a HWP at a quarter of that longitude brings it to H.
    """
    theta = np.mod(theta, 2 * np.pi)
    return WaveplateSetting(np.pi / 4, theta / 4 + np.pi / 8)


def phase_of_t3(beta: float) -> float:
    """Phase transferred by the QWP(pi/4) + HWP(beta) + PBS polarizer, in [0, 2pi)."""
    return float(np.mod(4 * beta - np.pi / 2, 2 * np.pi))
