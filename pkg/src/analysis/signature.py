"""
Deciding whether a session's (ITER, QBER) pair lies on the eavesdropping line.

Intercept-resend attacks in any basis produce (ITER, QBER) pairs on or near
the line fitted over a sweep. System noise moves the pair elsewhere. The
deviation score measures the distance from the line in units of the
combined standard error.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np
from tqdm import tqdm

from config.settings import settings
from src.analysis.sweep import SignatureFit
from src.protocol.session import EveStrategy, NoiseSpec, ProtocolSpec, SessionStats, run_session
from src.utils.exceptions import ContractViolationError, NoDataError
from src.utils.logger import logger
from src.utils.performance import performance_context


class Verdict(Enum):
    """Whether a session is consistent with pure eavesdropping."""
    ON_LINE = "ON-LINE"
    OFF_LINE = "OFF-LINE"


@dataclass(frozen=True)
class CalibrationResult:
    """Deviation scores of eavesdropper-only sessions and the threshold derived from them."""
    threshold: float
    quantile: float
    scores: Tuple[float, ...]
    seeds: Tuple[int, ...]

    @property
    def quantile_score(self) -> float:
        return float(np.quantile(self.scores, self.quantile))


def deviation_std_error(observed: SessionStats, fit: SignatureFit) -> float:
    """Combined standard error of ITER - (slope * QBER + intercept)."""
    est_iter = observed.est_iter
    est_qber = observed.est_qber
    combined = math.sqrt(
        est_iter.std_error ** 2
        + (fit.slope * est_qber.std_error) ** 2
        + fit.residual_std ** 2
    )
    # floor at the resolution of the same-basis ITER estimator: one index error in n
    return max(combined, 1.0 / est_iter.samples)


def signature_deviation(observed: SessionStats, fit: SignatureFit) -> float:
    """
    Distance of the observed (ITER, QBER) pair from the fitted line.

    Args:
        observed: Statistics of one session
        fit: Signature fit of the matching sweep

    Returns:
        |ITER - (slope * QBER + intercept)| divided by the combined standard error

    Raises:
        NoDataError: If the session has no same-basis test photons or no
            tested key bits
    """
    est_iter = observed.est_iter
    est_qber = observed.est_qber
    if est_iter.no_data or est_qber.no_data:
        raise NoDataError(
            f"Session seed={observed.seed} has no rate estimates "
            f"(same-basis tests={est_iter.samples}, tested key bits={est_qber.samples})"
        )
    residual = abs(est_iter.value - fit.predict(est_qber.value))
    return residual / deviation_std_error(observed, fit)


def classify(score: float, threshold: Optional[float] = None) -> Verdict:
    """ON-LINE when the score does not exceed the threshold."""
    threshold = settings.signature_threshold if threshold is None else threshold
    return Verdict.ON_LINE if score <= threshold else Verdict.OFF_LINE


def calibrate_threshold(spec: ProtocolSpec, eve: EveStrategy, fit: SignatureFit,
                        n_photons: Optional[int] = None,
                        seeds: Union[int, Iterable[int], None] = None,
                        quantile: Optional[float] = None,
                        test_fraction: Optional[float] = None,
                        noise: Optional[NoiseSpec] = None,
                        max_workers: Optional[int] = None,
                        show_progress: bool = False) -> CalibrationResult:
    """
    Score eavesdropper-only sessions over many seeds and take a quantile.

    The threshold never drops below settings.signature_threshold.

    Args:
        spec: Protocol and basis angles
        eve: Eavesdropper whose sessions define ON-LINE behaviour
        fit: Signature fit of the matching sweep
        n_photons: Photons per session
        seeds: Number of seeds (0..n-1) or explicit seeds, defaults to settings.calibration_seeds
        quantile: Score quantile, defaults to settings.calibration_quantile
        test_fraction: Test-sample probability
        noise: Optional noise applied to the calibration sessions
        max_workers: Worker threads per session
        show_progress: Show a progress bar on stderr

    Returns:
        CalibrationResult

    Raises:
        ContractViolationError: If the eavesdropper is absent, the quantile is
            outside [0, 1] or no session produced rate estimates
    """
    if not eve.present:
        raise ContractViolationError("Calibration needs an eavesdropper")
    quantile = settings.calibration_quantile if quantile is None else quantile
    if not (0.0 <= quantile <= 1.0):
        raise ContractViolationError(f"quantile must lie in [0, 1], got {quantile}")
    if seeds is None:
        seeds = settings.calibration_seeds
    seed_list = list(range(seeds)) if isinstance(seeds, int) else list(seeds)

    scores: List[float] = []
    used: List[int] = []
    with performance_context(f"calibration_{spec.kind.value}_{len(seed_list)}"):
        for seed in tqdm(seed_list, desc="Calibrating", disable=not show_progress):
            stats = run_session(spec, eve=eve, noise=noise, n_photons=n_photons,
                                test_fraction=test_fraction, seed=seed,
                                max_workers=max_workers).stats
            try:
                scores.append(signature_deviation(stats, fit))
                used.append(seed)
            except NoDataError:
                logger.warning(f"Calibration seed {seed} gave no rate estimates; skipped")

    if not scores:
        raise ContractViolationError("No calibration session produced rate estimates")

    quantile_score = float(np.quantile(scores, quantile))
    threshold = max(settings.signature_threshold, quantile_score)
    logger.info(
        f"Calibrated threshold {threshold:.4g} from {len(scores)} sessions "
        f"(q{quantile:g} score {quantile_score:.4g})"
    )
    return CalibrationResult(
        threshold=threshold,
        quantile=quantile,
        scores=tuple(scores),
        seeds=tuple(used),
    )
