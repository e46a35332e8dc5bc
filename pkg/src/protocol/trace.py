"""
Per-photon trace files.
"""
from pathlib import Path
from typing import Optional, Sequence, Union

import pandas as pd

from src.protocol.session import PhotonRecord
from src.utils.logger import logger

TRACE_COLUMNS = [
    "photon_index", "alice_basis", "alice_index", "eve_index", "noise_applied",
    "bob_basis", "bob_index", "set", "outcome", "decoded", "intended",
]

MISSING = "-"


def _optional(value: Optional[object]) -> str:
    return MISSING if value is None else str(value)


def trace_frame(records: Sequence[PhotonRecord]) -> pd.DataFrame:
    """One row per photon; absent values are written as '-'."""
    rows = [
        {
            "photon_index": r.photon_index,
            "alice_basis": r.alice_basis.value,
            "alice_index": r.alice_index,
            "eve_index": _optional(r.eve_index),
            "noise_applied": int(r.noise_applied),
            "bob_basis": r.bob_basis.value,
            "bob_index": r.bob_index,
            "set": MISSING if r.announced_set is None else r.announced_set.value,
            "outcome": r.outcome.value,
            "decoded": _optional(r.decoded),
            "intended": _optional(r.intended),
        }
        for r in records
    ]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def write_trace(records: Sequence[PhotonRecord], path: Union[str, Path]) -> Path:
    """
    Write a trace as comma-separated values with a header row.

    Args:
        records: Per-photon trace
        path: Output file

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trace_frame(records).to_csv(path, index=False, lineterminator="\n")
    logger.info(f"Wrote trace of {len(records)} photons to {path}")
    return path
