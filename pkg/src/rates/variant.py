"""
Closed-form rates for the three-basis variant of KMB09.

With Evan measuring in g, every quantity is a polynomial in the overlaps::

    x = |<g1|e1>|^2    y = |<g1|f1>|^2    z = |<g1|h1>|^2
"""
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from src.quantum.qstate import (
    BasisLabel,
    MeasurementBasis,
    basis_from_angles,
    overlap_prob,
    reduce_angle,
)
from src.utils.exceptions import UndefinedRateError

ArrayLike = Union[float, np.ndarray]

QB_EPSILON = 1e-12


@dataclass(frozen=True)
class VariantParams:
    """Angles of the f and h bases and of Evan's basis (radians)."""
    theta1: float
    theta2: float
    phi2: float
    theta3: float
    phi3: float

    def __post_init__(self):
        for name in ("theta1", "theta2", "phi2", "theta3", "phi3"):
            object.__setattr__(self, name, reduce_angle(getattr(self, name)))

    @property
    def e_basis(self) -> MeasurementBasis:
        return basis_from_angles(0.0, 0.0, BasisLabel.E)

    @property
    def f_basis(self) -> MeasurementBasis:
        return basis_from_angles(self.theta1, 0.0, BasisLabel.F)

    @property
    def h_basis(self) -> MeasurementBasis:
        return basis_from_angles(self.theta2, self.phi2, BasisLabel.H)

    @property
    def g_basis(self) -> MeasurementBasis:
        return basis_from_angles(self.theta3, self.phi3, BasisLabel.G)


@dataclass(frozen=True)
class VariantRates:
    """ITER, key-bit probability, QBER and no-attack efficiency."""
    iter: float
    qb: float
    qber: float
    eta: float

    @property
    def eta_evan(self) -> float:
        return self.qb


def variant_overlaps(p: VariantParams) -> Tuple[float, float, float]:
    """Return (|<g1|e1>|^2, |<g1|f1>|^2, |<g1|h1>|^2)."""
    g1 = p.g_basis.state1
    return (
        overlap_prob(g1, p.e_basis.state1),
        overlap_prob(g1, p.f_basis.state1),
        overlap_prob(g1, p.h_basis.state1),
    )


# Vectorized kernels

def iter_from_overlaps(x: ArrayLike, y: ArrayLike, z: ArrayLike) -> ArrayLike:
    """ITER = 2/3 (x + y + z - x^2 - y^2 - z^2)."""
    return (2.0 / 3.0) * (x + y + z - x * x - y * y - z * z)


def qb_from_overlaps(x: ArrayLike, y: ArrayLike, z: ArrayLike) -> ArrayLike:
    """Probability of a key bit per photon under attack."""
    squares = x * x + y * y + z * z
    cross = x * y + x * z + y * z
    return (4.0 / 9.0) * (x + y + z) - (2.0 / 9.0) * (squares + cross)


# Scalar API

def variant_iter(p: VariantParams) -> float:
    """
    Index transmission error rate, conditioned on Alice and Bob sharing a basis.

    Returns:
        Probability in [0, 0.5]
    """
    x, y, z = variant_overlaps(p)
    return float(min(max(iter_from_overlaps(x, y, z), 0.0), 0.5))


def variant_qb(p: VariantParams) -> float:
    """Probability that a photon yields a key bit while Evan intercepts."""
    x, y, z = variant_overlaps(p)
    return float(min(max(qb_from_overlaps(x, y, z), 0.0), 1.0))


def variant_qber(p: VariantParams) -> float:
    """
    QBER as ITER / (3 * P_QB).

    Erroneous bits only arise when both parties used the same basis, which
    happens for a third of the photons.

    Raises:
        UndefinedRateError: If P_QB <= 1e-12 (no key bits at all)
    """
    qb = variant_qb(p)
    if qb <= QB_EPSILON:
        raise UndefinedRateError(f"Variant QBER undefined: P_QB = {qb:.3e}")
    return float(min(max(variant_iter(p) / (3.0 * qb), 0.0), 1.0))


def variant_eta(theta1: float, theta2: float, phi2: float) -> float:
    """
    Key bits per photon without eavesdropping.

    1/6 - 1/18 [cos t1 + cos t2 + cos t1 cos t2 + cos p2 sin t1 sin t2]
    """
    theta1, theta2, phi2 = reduce_angle(theta1), reduce_angle(theta2), reduce_angle(phi2)
    bracket = (math.cos(theta1) + math.cos(theta2)
               + math.cos(theta1) * math.cos(theta2)
               + math.cos(phi2) * math.sin(theta1) * math.sin(theta2))
    return 1.0 / 6.0 - bracket / 18.0


def variant_eta_evan(p: VariantParams) -> float:
    """Efficiency under attack; identical to :func:`variant_qb`."""
    return variant_qb(p)


def variant_rates(p: VariantParams) -> VariantRates:
    """All variant quantities for one configuration."""
    return VariantRates(
        iter=variant_iter(p),
        qb=variant_qb(p),
        qber=variant_qber(p),
        eta=variant_eta(p.theta1, p.theta2, p.phi2),
    )


# Unsimplified sums over basis states

def _bases(p: VariantParams):
    return (p.e_basis, p.f_basis, p.h_basis)


def _transition(alice: MeasurementBasis, i: int, g: MeasurementBasis,
                bob: MeasurementBasis, j: int) -> float:
    """Probability that Alice's |a_i> ends as Bob's |b_j>, summed over Evan's outcome."""
    return sum(
        overlap_prob(alice.state(i), g.state(k)) * overlap_prob(g.state(k), bob.state(j))
        for k in (1, 2)
    )


def variant_iter_sum(p: VariantParams) -> float:
    """ITER as 1/6 sum over bases, i, k and j != i of the same-basis transitions."""
    g = p.g_basis
    total = 0.0
    for basis in _bases(p):
        for i in (1, 2):
            total += _transition(basis, i, g, basis, 3 - i)
    return total / 6.0


def variant_qb_sum(p: VariantParams) -> float:
    """
    P_QB = ITER/3 plus half of the different-basis, different-index events
    averaged over Alice's six states and Bob's three bases.
    """
    g = p.g_basis
    bases = _bases(p)
    cross = 0.0
    for alice in bases:
        for bob in bases:
            if alice is bob:
                continue
            for i in (1, 2):
                cross += _transition(alice, i, g, bob, 3 - i)
    return variant_iter_sum(p) / 3.0 + 0.5 * (1.0 / 3.0) * (1.0 / 6.0) * cross


def variant_eta_sum(theta1: float, theta2: float, phi2: float) -> float:
    """No-attack efficiency as 1/36 sum over ordered basis pairs and i != j."""
    e = basis_from_angles(0.0, 0.0, BasisLabel.E)
    f = basis_from_angles(theta1, 0.0, BasisLabel.F)
    h = basis_from_angles(theta2, phi2, BasisLabel.H)
    bases = (e, f, h)
    total = 0.0
    for alice in bases:
        for bob in bases:
            if alice is bob:
                continue
            for i in (1, 2):
                total += overlap_prob(alice.state(i), bob.state(3 - i))
    return total / 36.0


def variant_eta_overlap(theta1: float, theta2: float, phi2: float) -> float:
    """No-attack efficiency as 1/3 - 1/9 (|<e1|f1>|^2 + |<e1|h1>|^2 + |<f1|h1>|^2)."""
    e1 = basis_from_angles(0.0, 0.0, BasisLabel.E).state1
    f1 = basis_from_angles(theta1, 0.0, BasisLabel.F).state1
    h1 = basis_from_angles(theta2, phi2, BasisLabel.H).state1
    return 1.0 / 3.0 - (overlap_prob(e1, f1) + overlap_prob(e1, h1) + overlap_prob(f1, h1)) / 9.0
