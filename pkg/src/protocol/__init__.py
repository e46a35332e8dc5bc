"""
Monte Carlo simulation of KMB09 and variant sessions.
"""

from .sifting import BasisPairSet, OutcomeKind, SiftOutcome, sift_kmb09, sift_variant
from .session import (
    ProtocolKind,
    ProtocolSpec,
    EveStrategy,
    NoiseSpec,
    Estimate,
    SessionStats,
    PhotonRecord,
    SessionResult,
    SessionSimulator,
    run_session,
)

__all__ = [
    "BasisPairSet",
    "OutcomeKind",
    "SiftOutcome",
    "sift_kmb09",
    "sift_variant",
    "ProtocolKind",
    "ProtocolSpec",
    "EveStrategy",
    "NoiseSpec",
    "Estimate",
    "SessionStats",
    "PhotonRecord",
    "SessionResult",
    "SessionSimulator",
    "run_session",
]
