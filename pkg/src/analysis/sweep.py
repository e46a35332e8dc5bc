"""
Sweeps over the eavesdropper's basis and the ITER-versus-QBER signature fit.

A sweep evaluates the analytic rates for every Evan basis g(theta3, phi3) on
the uniform grid theta3, phi3 in {2 pi k / n : k = 0..n-1}, row-major with
theta3 outer. Points whose QBER is undefined are kept, flagged with
``defined=False`` and a NaN QBER, so the record count is always n^2.
"""
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config.settings import settings
from src.protocol.session import ProtocolKind, ProtocolSpec
from src.quantum.qstate import overlap_grid
from src.rates import kmb09 as kmb09_kernels
from src.rates import variant as variant_kernels
from src.utils.exceptions import ContractViolationError, DegenerateFitError, SweepFileError
from src.utils.logger import logger
from src.utils.performance import BatchProcessor, performance_context

SWEEP_COLUMNS = ["theta3_deg", "phi3_deg", "iter", "qber", "eta_evan", "eta"]
FLOAT_FORMAT = "%.9g"

# rows of the theta3 axis evaluated per work item
ROWS_PER_CHUNK = 16

# below this per-point sum of squares a response counts as exactly flat
FLAT_TOLERANCE = 1e-24


@dataclass(frozen=True)
class SweepRecord:
    """Analytic rates for one Evan basis (angles in radians)."""
    theta3: float
    phi3: float
    iter: float
    qber: float
    eta_evan: float
    eta: float
    defined: bool = True


@dataclass
class SweepTable:
    """Column-oriented sweep: one numpy array per field."""
    theta3: np.ndarray
    phi3: np.ndarray
    iter: np.ndarray
    qber: np.ndarray
    eta_evan: np.ndarray
    eta: float
    defined: np.ndarray

    def __len__(self) -> int:
        return len(self.theta3)

    @classmethod
    def from_records(cls, records: Sequence[SweepRecord]) -> "SweepTable":
        if not records:
            raise ContractViolationError("A sweep needs at least one record")
        return cls(
            theta3=np.array([r.theta3 for r in records], dtype=float),
            phi3=np.array([r.phi3 for r in records], dtype=float),
            iter=np.array([r.iter for r in records], dtype=float),
            qber=np.array([r.qber for r in records], dtype=float),
            eta_evan=np.array([r.eta_evan for r in records], dtype=float),
            eta=float(records[0].eta),
            defined=np.array([r.defined for r in records], dtype=bool),
        )

    def to_records(self) -> List[SweepRecord]:
        return [
            SweepRecord(
                theta3=float(self.theta3[k]),
                phi3=float(self.phi3[k]),
                iter=float(self.iter[k]),
                qber=float(self.qber[k]),
                eta_evan=float(self.eta_evan[k]),
                eta=self.eta,
                defined=bool(self.defined[k]),
            )
            for k in range(len(self))
        ]


@dataclass(frozen=True)
class SignatureFit:
    """Least-squares line ITER = slope * QBER + intercept over a sweep."""
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    qber_min: float
    argmin: Tuple[float, float]
    iter_at_min: float
    eta_evan_at_min: float
    residual_std: float = 0.0

    def predict(self, qber: float) -> float:
        return self.slope * qber + self.intercept


@dataclass(frozen=True)
class ExtremaRow:
    """QBER minimum of one protocol configuration."""
    spec: ProtocolSpec
    qber_min: float
    argmin: Tuple[float, float]
    iter_at_min: float
    eta_evan_at_min: float
    eta: float


def grid_angles(grid_n: int) -> np.ndarray:
    """Uniform angles 2 pi k / grid_n for k = 0..grid_n-1."""
    if grid_n < 2:
        raise ContractViolationError(f"grid_n must be >= 2, got {grid_n}")
    return 2.0 * math.pi * np.arange(grid_n) / grid_n


def _evaluate_kmb09(targets, theta, phi) -> Dict[str, np.ndarray]:
    x = overlap_grid(theta, phi, targets[0])
    y = overlap_grid(theta, phi, targets[1])
    numerator, denominator = kmb09_kernels.qber_terms_from_overlaps(x, y)
    defined = denominator > kmb09_kernels.DENOMINATOR_EPSILON
    safe = np.where(defined, denominator, 1.0)
    return {
        "iter": np.clip(kmb09_kernels.iter_from_overlaps(x, y), 0.0, 0.5),
        "qber": np.where(defined, np.clip(numerator / safe, 0.0, 1.0), np.nan),
        "eta_evan": np.clip(kmb09_kernels.eta_evan_from_overlaps(x, y), 0.0, 0.5),
        "defined": defined,
    }


def _evaluate_variant(targets, theta, phi) -> Dict[str, np.ndarray]:
    x = overlap_grid(theta, phi, targets[0])
    y = overlap_grid(theta, phi, targets[1])
    z = overlap_grid(theta, phi, targets[2])
    iter_ = np.clip(variant_kernels.iter_from_overlaps(x, y, z), 0.0, 0.5)
    qb = np.clip(variant_kernels.qb_from_overlaps(x, y, z), 0.0, 1.0)
    defined = qb > variant_kernels.QB_EPSILON
    safe = np.where(defined, qb, 1.0)
    return {
        "iter": iter_,
        "qber": np.where(defined, np.clip(iter_ / (3.0 * safe), 0.0, 1.0), np.nan),
        "eta_evan": qb,
        "defined": defined,
    }


def sweep_table(spec: ProtocolSpec, grid_n: Optional[int] = None,
                max_workers: Optional[int] = None) -> SweepTable:
    """
    Evaluate the analytic rates over the full (theta3, phi3) grid.

    Args:
        spec: Protocol and basis angles of Alice and Bob
        grid_n: Points per axis, defaults to settings.default_grid
        max_workers: Worker threads for row chunks; the result does not depend on it

    Returns:
        SweepTable with grid_n^2 rows in row-major order
    """
    grid_n = settings.default_grid if grid_n is None else grid_n
    angles = grid_angles(grid_n)
    workers = settings.max_workers if max_workers is None else max_workers

    targets = [basis.state1 for basis in spec.bases()]
    evaluate = _evaluate_kmb09 if spec.kind == ProtocolKind.KMB09 else _evaluate_variant

    def process_chunk(start: int) -> Dict[str, np.ndarray]:
        theta = angles[start:start + ROWS_PER_CHUNK, np.newaxis]
        return evaluate(targets, theta, angles[np.newaxis, :])

    logger.info(f"Sweeping {spec.kind.value} over a {grid_n}x{grid_n} grid")
    with performance_context(f"sweep_{spec.kind.value}_{grid_n}"):
        chunks = BatchProcessor(max_workers=workers).map(
            process_chunk, list(range(0, grid_n, ROWS_PER_CHUNK))
        )

    theta3, phi3 = np.meshgrid(angles, angles, indexing="ij")
    columns = {
        name: np.concatenate([chunk[name] for chunk in chunks], axis=0).ravel()
        for name in ("iter", "qber", "eta_evan", "defined")
    }
    table = SweepTable(
        theta3=theta3.ravel(),
        phi3=phi3.ravel(),
        eta=spec.eta(),
        **columns,
    )

    undefined = int(np.count_nonzero(~table.defined))
    if undefined:
        logger.warning(f"{undefined} grid points have an undefined QBER")
    return table


def sweep_eve(spec: ProtocolSpec, grid_n: Optional[int] = None,
              max_workers: Optional[int] = None) -> List[SweepRecord]:
    """Record-per-point form of :func:`sweep_table`."""
    return sweep_table(spec, grid_n, max_workers).to_records()


def _as_table(records: Union[SweepTable, Sequence[SweepRecord]]) -> SweepTable:
    if isinstance(records, SweepTable):
        return records
    return SweepTable.from_records(records)


def _locate_minimum(table: SweepTable) -> int:
    """Index of the smallest defined QBER; ties go to the smallest (theta3, phi3)."""
    valid = np.flatnonzero(table.defined)
    if valid.size == 0:
        raise DegenerateFitError("No sweep point has a defined QBER")
    qber = table.qber[valid]
    ties = valid[qber == qber.min()]
    order = np.lexsort((table.phi3[ties], table.theta3[ties]))
    return int(ties[order[0]])


def fit_signature(records: Union[SweepTable, Sequence[SweepRecord]]) -> SignatureFit:
    """
    Ordinary least-squares fit of ITER against QBER over the defined points.

    Args:
        records: Sweep records or a SweepTable

    Returns:
        SignatureFit with the line, R^2 and the location of the QBER minimum

    Raises:
        DegenerateFitError: If fewer than two points are defined or the QBER
            does not vary
    """
    table = _as_table(records)
    mask = table.defined & np.isfinite(table.qber)
    n = int(np.count_nonzero(mask))
    if n < 2:
        raise DegenerateFitError(f"Need at least 2 defined sweep points, got {n}")

    q = table.qber[mask]
    i = table.iter[mask]
    dq = q - q.mean()
    sxx = float(np.dot(dq, dq))
    if sxx <= FLAT_TOLERANCE * n:
        raise DegenerateFitError("QBER is constant over the sweep")

    slope = float(np.dot(dq, i - i.mean()) / sxx)
    intercept = float(i.mean() - slope * q.mean())
    residuals = i - (slope * q + intercept)
    ss_res = float(np.dot(residuals, residuals))
    ss_tot = float(np.dot(i - i.mean(), i - i.mean()))

    if ss_tot <= FLAT_TOLERANCE * n:
        # flat response: a perfect fit or none at all
        r_squared = 1.0 if ss_res <= FLAT_TOLERANCE * n else 0.0
    else:
        r_squared = min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)

    residual_std = math.sqrt(ss_res / (n - 2)) if n > 2 else 0.0

    k = _locate_minimum(table)
    fit = SignatureFit(
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        n_points=n,
        qber_min=float(table.qber[k]),
        argmin=(float(table.theta3[k]), float(table.phi3[k])),
        iter_at_min=float(table.iter[k]),
        eta_evan_at_min=float(table.eta_evan[k]),
        residual_std=residual_std,
    )
    logger.info(
        f"Signature fit: slope={fit.slope:.6g}, intercept={fit.intercept:.6g}, "
        f"R^2={fit.r_squared:.6g} over {n} points"
    )
    return fit


def extrema_table(specs: Sequence[ProtocolSpec], grid_n: Optional[int] = None,
                  max_workers: Optional[int] = None) -> List[ExtremaRow]:
    """
    QBER minimum over all Evan bases for each configuration.

    Used to tabulate how the best attack depends on the angle between
    Alice's bases.
    """
    rows = []
    for spec in specs:
        table = sweep_table(spec, grid_n, max_workers)
        k = _locate_minimum(table)
        rows.append(ExtremaRow(
            spec=spec,
            qber_min=float(table.qber[k]),
            argmin=(float(table.theta3[k]), float(table.phi3[k])),
            iter_at_min=float(table.iter[k]),
            eta_evan_at_min=float(table.eta_evan[k]),
            eta=table.eta,
        ))
    return rows


def sweep_frame(records: Union[SweepTable, Sequence[SweepRecord]]) -> pd.DataFrame:
    """Sweep in output-file layout: angles in degrees, header per SWEEP_COLUMNS."""
    table = _as_table(records)
    return pd.DataFrame({
        "theta3_deg": np.degrees(table.theta3),
        "phi3_deg": np.degrees(table.phi3),
        "iter": table.iter,
        "qber": table.qber,
        "eta_evan": table.eta_evan,
        "eta": np.full(len(table), table.eta),
    }, columns=SWEEP_COLUMNS)


def write_sweep(records: Union[SweepTable, Sequence[SweepRecord]],
                path: Union[str, Path]) -> Path:
    """
    Write a sweep as CSV with 9 significant digits per value.

    Undefined QBER values are written as ``nan``.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = sweep_frame(records)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="nan",
                 lineterminator="\n")
    logger.info(f"Wrote {len(frame)} sweep records to {path}")
    return path


def read_sweep(path: Union[str, Path]) -> SweepTable:
    """
    Load a sweep file written by :func:`write_sweep`.

    Raises:
        SweepFileError: If the file is empty, has the wrong header, holds
            non-numeric or out-of-range values, is not a square grid or mixes
            several efficiencies
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as e:
        raise SweepFileError(f"Sweep file {path} is empty") from e
    except pd.errors.ParserError as e:
        raise SweepFileError(f"Cannot parse sweep file {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise SweepFileError(f"Sweep file {path} is not text: {e}") from e

    if list(frame.columns) != SWEEP_COLUMNS:
        raise SweepFileError(
            f"Sweep file {path} has header {','.join(map(str, frame.columns))}, "
            f"expected {','.join(SWEEP_COLUMNS)}"
        )
    if frame.empty:
        raise SweepFileError(f"Sweep file {path} has no records")

    try:
        values = frame.apply(lambda column: pd.to_numeric(column.str.strip(), errors="raise"))
    except (ValueError, TypeError) as e:
        raise SweepFileError(f"Non-numeric value in sweep file {path}: {e}") from e

    data: Dict[str, Any] = {name: values[name].to_numpy(dtype=float) for name in SWEEP_COLUMNS}
    for name in ("theta3_deg", "phi3_deg", "iter", "eta_evan", "eta"):
        if not np.all(np.isfinite(data[name])):
            raise SweepFileError(f"Column {name} of {path} holds non-finite values")

    for name in ("iter", "qber", "eta_evan", "eta"):
        column = data[name][np.isfinite(data[name])]
        if np.any((column < 0.0) | (column > 1.0)):
            raise SweepFileError(f"Column {name} of {path} holds values outside [0, 1]")

    n_rows = len(frame)
    if math.isqrt(n_rows) ** 2 != n_rows:
        raise SweepFileError(f"Sweep file {path} has {n_rows} records, not a square grid")

    eta = data["eta"]
    if not np.allclose(eta, eta[0], rtol=0.0, atol=1e-9):
        raise SweepFileError(f"Sweep file {path} mixes several efficiencies")

    logger.info(f"Loaded {len(frame)} sweep records from {path}")
    return SweepTable(
        theta3=np.radians(data["theta3_deg"]),
        phi3=np.radians(data["phi3_deg"]),
        iter=data["iter"],
        qber=data["qber"],
        eta_evan=data["eta_evan"],
        eta=float(eta[0]),
        defined=np.isfinite(data["qber"]),
    )
