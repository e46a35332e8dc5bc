"""
Eavesdropper sweeps, signature fits and session classification.
"""

from .sweep import (
    SweepRecord,
    SweepTable,
    SignatureFit,
    ExtremaRow,
    sweep_eve,
    sweep_table,
    fit_signature,
    extrema_table,
    read_sweep,
    write_sweep,
)
from .signature import (
    Verdict,
    CalibrationResult,
    signature_deviation,
    classify,
    calibrate_threshold,
)

__all__ = [
    "SweepRecord",
    "SweepTable",
    "SignatureFit",
    "ExtremaRow",
    "sweep_eve",
    "sweep_table",
    "fit_signature",
    "extrema_table",
    "read_sweep",
    "write_sweep",
    "Verdict",
    "CalibrationResult",
    "signature_deviation",
    "classify",
    "calibrate_threshold",
]
