"""
Closed-form error rates and efficiencies of the two-basis KMB09 protocol
under intercept-resend eavesdropping.

All quantities depend on Evan's basis g only through two overlaps::

    x = |<g1|e1>|^2        y = |<g1|f1>|^2

The ``*_from_overlaps`` kernels accept scalars or numpy arrays so sweeps can
evaluate whole grids at once. The ``*_sum`` functions evaluate the original
unsimplified sums over all basis states and serve as cross-checks.
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

DENOMINATOR_EPSILON = 1e-12


@dataclass(frozen=True)
class Kmb09Params:
    """Alice/Bob basis separation and Evan's basis angles (radians)."""
    theta1: float
    theta3: float
    phi3: float

    def __post_init__(self):
        for name in ("theta1", "theta3", "phi3"):
            object.__setattr__(self, name, reduce_angle(getattr(self, name)))

    @property
    def e_basis(self) -> MeasurementBasis:
        return basis_from_angles(0.0, 0.0, BasisLabel.E)

    @property
    def f_basis(self) -> MeasurementBasis:
        return basis_from_angles(self.theta1, 0.0, BasisLabel.F)

    @property
    def g_basis(self) -> MeasurementBasis:
        return basis_from_angles(self.theta3, self.phi3, BasisLabel.G)


@dataclass(frozen=True)
class RateQuartet:
    """ITER, QBER and key-bit efficiencies for one KMB09 configuration."""
    iter: float
    qber: float
    eta: float
    eta_evan: float


def kmb09_overlaps(p: Kmb09Params) -> Tuple[float, float]:
    """Return (|<g1|e1>|^2, |<g1|f1>|^2)."""
    g1 = p.g_basis.state1
    return overlap_prob(g1, p.e_basis.state1), overlap_prob(g1, p.f_basis.state1)


# Vectorized kernels

def iter_from_overlaps(x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """ITER = x + y - x^2 - y^2."""
    return x + y - x * x - y * y


def qber_terms_from_overlaps(x: ArrayLike, y: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """Numerator and denominator of the QBER ratio."""
    s = x + y
    return x + y - x * x - y * y, 2.0 * s - s * s


def eta_evan_from_overlaps(x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """Key bits per photon under attack: s - s^2/2 with s = x + y."""
    s = x + y
    return s - 0.5 * s * s


# Scalar API

def kmb09_iter(p: Kmb09Params) -> float:
    """
    Index transmission error rate under intercept-resend eavesdropping.

    Args:
        p: Protocol and eavesdropper angles

    Returns:
        Probability in [0, 0.5]
    """
    x, y = kmb09_overlaps(p)
    return float(min(max(iter_from_overlaps(x, y), 0.0), 0.5))


def kmb09_qber(p: Kmb09Params) -> float:
    """
    Quantum bit error rate under intercept-resend eavesdropping.

    Raises:
        UndefinedRateError: If x + y is 0 or 2, which only happens when the
            e and f bases coincide
    """
    x, y = kmb09_overlaps(p)
    numerator, denominator = qber_terms_from_overlaps(x, y)
    if denominator <= DENOMINATOR_EPSILON:
        raise UndefinedRateError(
            f"KMB09 QBER undefined: x + y = {x + y:.12g} (theta1={p.theta1:.6g})"
        )
    return float(min(max(numerator / denominator, 0.0), 1.0))


def kmb09_eta(theta1: float) -> float:
    """Key bits per photon without eavesdropping: 1/2 sin^2(theta1/2)."""
    theta1 = reduce_angle(theta1)
    return 0.5 * math.sin(theta1 / 2.0) ** 2


def kmb09_eta_evan(p: Kmb09Params) -> float:
    """Key bits per photon with Evan present."""
    x, y = kmb09_overlaps(p)
    return float(min(max(eta_evan_from_overlaps(x, y), 0.0), 0.5))


def kmb09_rates(p: Kmb09Params) -> RateQuartet:
    """All four quantities for one configuration."""
    return RateQuartet(
        iter=kmb09_iter(p),
        qber=kmb09_qber(p),
        eta=kmb09_eta(p.theta1),
        eta_evan=kmb09_eta_evan(p),
    )


# Unsimplified sums over basis states

def _overlap_tables(p: Kmb09Params):
    """ge[k][i] = |<g_k|e_i>|^2 and gf[k][i] = |<g_k|f_i>|^2 (0-based)."""
    e, f, g = p.e_basis, p.f_basis, p.g_basis
    ge = [[overlap_prob(g.state(k), e.state(i)) for i in (1, 2)] for k in (1, 2)]
    gf = [[overlap_prob(g.state(k), f.state(i)) for i in (1, 2)] for k in (1, 2)]
    return ge, gf


def kmb09_iter_sum(p: Kmb09Params) -> float:
    """ITER as 1 - 1/4 sum_{i,k} (|<g_k|e_i>|^4 + |<g_k|f_i>|^4)."""
    ge, gf = _overlap_tables(p)
    total = sum(ge[k][i] ** 2 + gf[k][i] ** 2 for i in range(2) for k in range(2))
    return 1.0 - total / 4.0


def kmb09_qber_sum(p: Kmb09Params) -> float:
    """QBER as the ratio of the fourth-power and squared-sum expressions."""
    ge, gf = _overlap_tables(p)
    numerator = 4.0 - sum(ge[k][i] ** 2 + gf[k][i] ** 2 for i in range(2) for k in range(2))
    denominator = 8.0 - sum((ge[k][i] + gf[k][i]) ** 2 for i in range(2) for k in range(2))
    if denominator <= 4.0 * DENOMINATOR_EPSILON:
        raise UndefinedRateError("KMB09 QBER undefined for coincident bases")
    return numerator / denominator


def kmb09_eta_sum(theta1: float) -> float:
    """Efficiency as 1/8 sum_i sum_{j!=i} (|<e_i|f_j>|^2 + |<f_i|e_j>|^2)."""
    e = basis_from_angles(0.0, 0.0, BasisLabel.E)
    f = basis_from_angles(theta1, 0.0, BasisLabel.F)
    total = 0.0
    for i in (1, 2):
        for j in (1, 2):
            if j != i:
                total += overlap_prob(e.state(i), f.state(j)) + overlap_prob(f.state(i), e.state(j))
    return total / 8.0


def kmb09_eta_evan_sum(p: Kmb09Params) -> float:
    """
    Efficiency under attack by enumerating Alice's state, Evan's outcome,
    Bob's basis and Bob's differing index.
    """
    bases = (p.e_basis, p.f_basis)
    g = p.g_basis
    total = 0.0
    for alice in bases:
        for bob in bases:
            for i in (1, 2):
                for k in (1, 2):
                    for j in (1, 2):
                        if j == i:
                            continue
                        total += (overlap_prob(alice.state(i), g.state(k))
                                  * overlap_prob(g.state(k), bob.state(j)))
    return total / 8.0
