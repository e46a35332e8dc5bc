"""
Qubit states, measurement bases and Born-rule sampling.
"""

from .qstate import (
    BasisLabel,
    PureState,
    MeasurementBasis,
    basis_from_angles,
    overlap_prob,
    born_sample,
    bloch_vector,
    overlap_grid,
    reduce_angle,
)

__all__ = [
    "BasisLabel",
    "PureState",
    "MeasurementBasis",
    "basis_from_angles",
    "overlap_prob",
    "born_sample",
    "bloch_vector",
    "overlap_grid",
    "reduce_angle",
]
