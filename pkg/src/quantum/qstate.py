"""
Qubit states and angle-parametrized measurement bases.

Every basis used by Alice, Bob and the eavesdropper is built from two angles
on the Bloch sphere::

    |b1> = ( cos(theta/2),  e^{i phi} sin(theta/2) )
    |b2> = ( sin(theta/2), -e^{i phi} cos(theta/2) )

The phase convention is kept exactly as written, including the minus sign on
the second component of ``|b2>``.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from src.utils.exceptions import ContractViolationError, InvalidAngleError

TWO_PI = 2.0 * math.pi
NORM_TOLERANCE = 1e-12
SNAP_TOLERANCE = 1e-14


class BasisLabel(Enum):
    """Names of the bases appearing in the protocols."""
    E = "E"
    F = "F"
    H = "H"
    G = "G"


@dataclass(frozen=True)
class PureState:
    """A normalized two-dimensional complex state vector."""
    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if not math.isfinite(norm) or abs(norm - 1.0) > NORM_TOLERANCE:
            raise ContractViolationError(f"State is not unit-norm (|psi|^2 = {norm!r})")

    def as_array(self) -> np.ndarray:
        """Return the state as a complex column-free numpy vector."""
        return np.array([self.amp0, self.amp1], dtype=complex)


@dataclass(frozen=True)
class MeasurementBasis:
    """An orthonormal pair of states together with its generating angles."""
    state1: PureState
    state2: PureState
    theta: float
    phi: float
    label: BasisLabel

    def state(self, index: int) -> PureState:
        """Return the basis state with index 1 or 2."""
        if index == 1:
            return self.state1
        if index == 2:
            return self.state2
        raise ContractViolationError(f"Basis index must be 1 or 2, got {index}")

    def as_matrix(self) -> np.ndarray:
        """Rows are the two basis states."""
        return np.array([self.state1.as_array(), self.state2.as_array()], dtype=complex)


def reduce_angle(angle: float) -> float:
    """
    Reduce an angle to the canonical range [0, 2*pi).

    Raises:
        InvalidAngleError: If the angle is NaN or infinite
    """
    try:
        value = float(angle)
    except (TypeError, ValueError) as e:
        raise InvalidAngleError(f"Angle is not a real number: {angle!r}") from e
    if not math.isfinite(value):
        raise InvalidAngleError(f"Angle must be finite, got {angle!r}")
    reduced = math.fmod(value, TWO_PI)
    if reduced < 0.0:
        reduced += TWO_PI
    # fmod of a tiny negative number can land exactly on 2*pi
    return 0.0 if reduced >= TWO_PI else reduced


def basis_from_angles(theta: float, phi: float,
                      label: Union[BasisLabel, str] = BasisLabel.G) -> MeasurementBasis:
    """
    Build the measurement basis generated by polar angle ``theta`` and
    azimuthal angle ``phi`` (radians).

    Args:
        theta: Polar angle, any finite value (reduced mod 2*pi)
        phi: Azimuthal angle, any finite value (reduced mod 2*pi)
        label: Which basis this is (E, F, H or G)

    Returns:
        MeasurementBasis with pairwise orthogonal unit states

    Raises:
        InvalidAngleError: If an angle is not finite
    """
    theta = reduce_angle(theta)
    phi = reduce_angle(phi)
    label = BasisLabel(label) if not isinstance(label, BasisLabel) else label

    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    phase = complex(math.cos(phi), math.sin(phi))

    return MeasurementBasis(
        state1=PureState(complex(c), phase * s),
        state2=PureState(complex(s), -phase * c),
        theta=theta,
        phi=phi,
        label=label,
    )


def _clamp_probability(value: float) -> float:
    # within SNAP_TOLERANCE of 0 or 1 counts as a certain outcome
    if value < SNAP_TOLERANCE:
        return 0.0
    if value > 1.0 - SNAP_TOLERANCE:
        return 1.0
    return value


def overlap_prob(a: PureState, b: PureState) -> float:
    """
    Transition probability |<a|b>|^2, clamped to [0, 1].

    Args:
        a: Bra state
        b: Ket state

    Returns:
        Probability in [0, 1]
    """
    amplitude = a.amp0.conjugate() * b.amp0 + a.amp1.conjugate() * b.amp1
    return _clamp_probability(amplitude.real ** 2 + amplitude.imag ** 2)


def born_sample(state: PureState, basis: MeasurementBasis, rand: float) -> int:
    """
    Projective measurement of ``state`` in ``basis`` driven by a uniform draw.

    Returns 1 when ``rand`` falls below the probability of the first basis
    state and 2 otherwise, so the outcome is a deterministic function of
    ``rand``.

    Raises:
        ContractViolationError: If ``rand`` is outside [0, 1)
    """
    if not (0.0 <= rand < 1.0):
        raise ContractViolationError(f"Uniform draw must lie in [0, 1), got {rand!r}")
    return 1 if rand < overlap_prob(basis.state1, state) else 2


def bloch_vector(state: PureState) -> Tuple[float, float, float]:
    """
    Real unit vector (x, y, z) representing ``state`` on the Bloch sphere.

    For a state built by :func:`basis_from_angles` the first basis vector maps
    to (sin theta cos phi, sin theta sin phi, cos theta).
    """
    a0, a1 = state.amp0, state.amp1
    cross = a0.conjugate() * a1
    return (
        2.0 * cross.real,
        2.0 * cross.imag,
        abs(a0) ** 2 - abs(a1) ** 2,
    )


def overlap_grid(theta: np.ndarray, phi: np.ndarray, target: PureState) -> np.ndarray:
    """
    Vectorized |<g1(theta, phi)|target>|^2 over arrays of angles.

    ``theta`` and ``phi`` broadcast against each other, which lets a sweep
    evaluate a full (theta, phi) mesh in one call.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(phi))):
        raise InvalidAngleError("Sweep angles must be finite")

    g0 = np.cos(theta / 2.0)
    g1 = np.exp(1j * phi) * np.sin(theta / 2.0)
    amplitude = np.conj(g0) * target.amp0 + np.conj(g1) * target.amp1
    return np.clip(np.abs(amplitude) ** 2, 0.0, 1.0)
