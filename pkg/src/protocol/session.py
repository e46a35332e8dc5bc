"""
Event-level Monte Carlo simulation of complete protocol sessions.

Each photon goes through preparation by Alice, optional intercept-resend by
Evan, optional depolarizing noise, Bob's measurement, the public sifting
announcements and the final test-sample comparison.

Randomness is counter based. Photons are grouped into fixed blocks of
``STREAM_BLOCK`` photons and block ``b`` of a session with seed ``s`` draws
from ``Philox(key=s, counter=[0, b, 0, 0])``; every photon consumes exactly
``N_SLOTS`` uniforms in a fixed slot order. A draw is therefore a function of
(seed, photon index, slot) only, and sessions give identical results however
the blocks are spread over workers.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from config.settings import settings
from src.quantum.qstate import (
    BasisLabel,
    MeasurementBasis,
    basis_from_angles,
    reduce_angle,
    SNAP_TOLERANCE,
)
from src.rates.kmb09 import Kmb09Params, kmb09_eta
from src.rates.variant import VariantParams, variant_eta
from src.protocol.sifting import (
    BASIS_ORDER,
    BIT_TABLE,
    KMB09_DECODED_TABLE,
    KMB09_INTENDED_TABLE,
    MEMBERSHIP_TABLE,
    NO_SET,
    OTHER_TABLE,
    SET_BY_BOB_TABLE,
    SET_ORDER,
    BasisPairSet,
    OutcomeKind,
)
from src.utils.exceptions import ConfigurationError, ContractViolationError
from src.utils.logger import logger
from src.utils.performance import BatchProcessor, performance_context

STREAM_BLOCK = 1024

# slot order of the per-photon uniforms
SLOT_ALICE_BASIS = 0
SLOT_ALICE_INDEX = 1
SLOT_EVE_MEASURE = 2
SLOT_NOISE_APPLY = 3
SLOT_NOISE_INDEX = 4
SLOT_BOB_BASIS = 5
SLOT_BOB_MEASURE = 6
SLOT_SET_DRAW = 7
SLOT_TEST_SELECT = 8
N_SLOTS = 9

MAX_SEED = 2 ** 128


class ProtocolKind(Enum):
    """Which protocol a session runs."""
    KMB09 = "kmb09"
    VARIANT = "variant"


@dataclass(frozen=True)
class ProtocolSpec:
    """Protocol choice plus the angles of Alice's and Bob's bases (radians)."""
    kind: ProtocolKind
    theta1: float
    theta2: Optional[float] = None
    phi2: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ProtocolKind(self.kind))
        object.__setattr__(self, "theta1", reduce_angle(self.theta1))
        if self.kind == ProtocolKind.VARIANT:
            if self.theta2 is None or self.phi2 is None:
                raise ConfigurationError("The variant protocol needs theta2 and phi2")
            object.__setattr__(self, "theta2", reduce_angle(self.theta2))
            object.__setattr__(self, "phi2", reduce_angle(self.phi2))

    @property
    def n_bases(self) -> int:
        return 2 if self.kind == ProtocolKind.KMB09 else 3

    def bases(self) -> List[MeasurementBasis]:
        """Alice's and Bob's bases in the order E, F(, H)."""
        bases = [
            basis_from_angles(0.0, 0.0, BasisLabel.E),
            basis_from_angles(self.theta1, 0.0, BasisLabel.F),
        ]
        if self.kind == ProtocolKind.VARIANT:
            bases.append(basis_from_angles(self.theta2, self.phi2, BasisLabel.H))
        return bases

    def eta(self) -> float:
        """Key-bit efficiency without eavesdropping."""
        if self.kind == ProtocolKind.KMB09:
            return kmb09_eta(self.theta1)
        return variant_eta(self.theta1, self.theta2, self.phi2)

    def with_eve(self, theta3: float, phi3: float):
        """Analytic parameter object for an eavesdropper measuring in (theta3, phi3)."""
        if self.kind == ProtocolKind.KMB09:
            return Kmb09Params(self.theta1, theta3, phi3)
        return VariantParams(self.theta1, self.theta2, self.phi2, theta3, phi3)


@dataclass(frozen=True)
class EveStrategy:
    """Intercept-resend eavesdropper measuring in the basis g(theta3, phi3)."""
    present: bool = False
    theta3: float = 0.0
    phi3: float = 0.0

    def __post_init__(self):
        if self.present:
            object.__setattr__(self, "theta3", reduce_angle(self.theta3))
            object.__setattr__(self, "phi3", reduce_angle(self.phi3))

    def basis(self) -> MeasurementBasis:
        return basis_from_angles(self.theta3, self.phi3, BasisLabel.G)


@dataclass(frozen=True)
class NoiseSpec:
    """Probability that Bob's outcome index is replaced by a uniform draw."""
    flip_prob: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.flip_prob <= 1.0):
            raise ContractViolationError(f"flip_prob must lie in [0, 1], got {self.flip_prob}")


@dataclass(frozen=True)
class Estimate:
    """A binomial proportion with its standard error."""
    value: float
    std_error: float
    samples: int

    @property
    def no_data(self) -> bool:
        return self.samples == 0

    @classmethod
    def from_counts(cls, successes: int, trials: int) -> "Estimate":
        if trials == 0:
            return cls(0.0, 0.0, 0)
        p = successes / trials
        return cls(p, math.sqrt(p * (1.0 - p) / trials), trials)


@dataclass(frozen=True)
class SessionStats:
    """Counts from one session and the rate estimates derived from them."""
    photons_sent: int
    key_bits: int
    tested_bits: int
    wrong_test_bits: int
    same_basis_tested: int
    index_errors_same_basis: int
    discarded_set_miss: int
    noise_events: int
    seed: int

    @property
    def est_qber(self) -> Estimate:
        return Estimate.from_counts(self.wrong_test_bits, self.tested_bits)

    @property
    def est_iter(self) -> Estimate:
        return Estimate.from_counts(self.index_errors_same_basis, self.same_basis_tested)

    @property
    def est_efficiency(self) -> Estimate:
        return Estimate.from_counts(self.key_bits, self.photons_sent)

    @property
    def final_key_bits(self) -> int:
        """Key bits left after the revealed test bits are discarded."""
        return self.key_bits - self.tested_bits

    @property
    def no_data(self) -> bool:
        return self.key_bits == 0


@dataclass(frozen=True)
class PhotonRecord:
    """Everything that happened to one photon."""
    photon_index: int
    alice_basis: BasisLabel
    alice_index: int
    eve_index: Optional[int]
    noise_applied: bool
    bob_basis: BasisLabel
    bob_index: int
    announced_set: Optional[BasisPairSet]
    outcome: OutcomeKind
    decoded: Optional[int]
    intended: Optional[int]
    tested: bool


@dataclass
class SessionResult:
    """Statistics of a session plus the optional per-photon trace."""
    stats: SessionStats
    records: Optional[List[PhotonRecord]] = None


@dataclass
class _BlockResult:
    counts: Dict[str, int]
    arrays: Optional[Dict[str, np.ndarray]] = None


COUNT_FIELDS = (
    "photons_sent", "key_bits", "tested_bits", "wrong_test_bits",
    "same_basis_tested", "index_errors_same_basis", "discarded_set_miss", "noise_events",
)


def block_uniforms(seed: int, block_id: int) -> np.ndarray:
    """Uniform draws of one stream block, shape (STREAM_BLOCK, N_SLOTS)."""
    bit_generator = np.random.Philox(
        key=seed, counter=np.array([0, block_id, 0, 0], dtype=np.uint64)
    )
    return np.random.Generator(bit_generator).random((STREAM_BLOCK, N_SLOTS))


def _first_state_probability(bra: np.ndarray, kets: np.ndarray) -> np.ndarray:
    """|<bra|ket>|^2 row-wise with exact outcomes snapped like ``overlap_prob``."""
    amplitude = np.sum(np.conj(bra) * kets, axis=-1)
    prob = np.abs(amplitude) ** 2
    prob = np.where(prob < SNAP_TOLERANCE, 0.0, prob)
    return np.where(prob > 1.0 - SNAP_TOLERANCE, 1.0, prob)


class SessionSimulator:
    """Runs seeded protocol sessions for one protocol, eavesdropper and noise model."""

    def __init__(self, spec: ProtocolSpec, eve: Optional[EveStrategy] = None,
                 noise: Optional[NoiseSpec] = None, config: Optional[Dict[str, Any]] = None):
        """
        Initialize the simulator.

        Args:
            spec: Protocol and basis angles
            eve: Eavesdropper, absent by default
            noise: Depolarizing noise, none by default
            config: Optional configuration dictionary (``max_workers``)
        """
        self.config = config or {}
        self.settings = settings
        self.logger = logger

        self.spec = spec
        self.eve = eve or EveStrategy()
        self.noise = noise or NoiseSpec()

        self.max_workers = int(self.config.get('max_workers', settings.max_workers))
        self.batch_processor = BatchProcessor(max_workers=self.max_workers)

        self._bases = np.array([b.as_matrix() for b in spec.bases()])  # (n_bases, 2, 2)
        self._eve_basis = self.eve.basis().as_matrix() if self.eve.present else None

    def run(self, n_photons: int, test_fraction: Optional[float] = None,
            seed: int = 0, trace: bool = False) -> SessionResult:
        """
        Simulate ``n_photons`` photons.

        Args:
            n_photons: Number of photons Alice sends (>= 1)
            test_fraction: Probability that a photon is used for rate estimation
            seed: Session seed, a non-negative integer below 2**128
            trace: Also return one PhotonRecord per photon

        Returns:
            SessionResult with statistics and, if requested, the trace
        """
        if test_fraction is None:
            test_fraction = self.settings.default_test_fraction
        if n_photons < 1:
            raise ContractViolationError(f"n_photons must be >= 1, got {n_photons}")
        if not (0.0 < test_fraction <= 1.0):
            raise ContractViolationError(f"test_fraction must lie in (0, 1], got {test_fraction}")
        if not (0 <= seed < MAX_SEED):
            raise ContractViolationError(f"seed must lie in [0, 2**128), got {seed}")

        n_blocks = (n_photons + STREAM_BLOCK - 1) // STREAM_BLOCK
        self.logger.info(
            f"Starting {self.spec.kind.value} session: {n_photons} photons, seed={seed}, "
            f"eve={'on' if self.eve.present else 'off'}, noise={self.noise.flip_prob}"
        )

        def process_block(block_id: int) -> _BlockResult:
            start = block_id * STREAM_BLOCK
            count = min(STREAM_BLOCK, n_photons - start)
            return self._simulate_block(seed, block_id, count, test_fraction, trace)

        with performance_context(f"session_{self.spec.kind.value}_{n_photons}"):
            results = self.batch_processor.map(process_block, list(range(n_blocks)))

        totals = {name: 0 for name in COUNT_FIELDS}
        for result in results:
            for name in COUNT_FIELDS:
                totals[name] += result.counts[name]

        stats = SessionStats(seed=seed, **totals)
        if stats.no_data:
            self.logger.warning(f"Session with seed={seed} produced no key bits")

        records = self._build_records(results) if trace else None
        return SessionResult(stats=stats, records=records)

    def _simulate_block(self, seed: int, block_id: int, count: int,
                        test_fraction: float, keep_arrays: bool) -> _BlockResult:
        u = block_uniforms(seed, block_id)[:count]
        n_bases = self.spec.n_bases

        alice_basis = np.minimum((u[:, SLOT_ALICE_BASIS] * n_bases).astype(np.int64), n_bases - 1)
        alice_index = np.where(u[:, SLOT_ALICE_INDEX] < 0.5, 1, 2)
        states = self._bases[alice_basis, alice_index - 1]  # (count, 2)

        eve_index = None
        if self.eve.present:
            p_first = _first_state_probability(self._eve_basis[0], states)
            eve_index = np.where(u[:, SLOT_EVE_MEASURE] < p_first, 1, 2)
            states = self._eve_basis[eve_index - 1]

        bob_basis = np.minimum((u[:, SLOT_BOB_BASIS] * n_bases).astype(np.int64), n_bases - 1)
        p_first = _first_state_probability(self._bases[bob_basis, 0], states)
        bob_index = np.where(u[:, SLOT_BOB_MEASURE] < p_first, 1, 2)

        noise_applied = u[:, SLOT_NOISE_APPLY] < self.noise.flip_prob
        bob_index = np.where(
            noise_applied, np.where(u[:, SLOT_NOISE_INDEX] < 0.5, 1, 2), bob_index
        )

        differ = alice_index != bob_index
        same_basis = alice_basis == bob_basis

        if self.spec.kind == ProtocolKind.KMB09:
            announced = np.full(count, NO_SET, dtype=np.int64)
            key = differ
            set_miss = np.zeros(count, dtype=bool)
            decoded = KMB09_DECODED_TABLE[bob_basis]
            intended = KMB09_INTENDED_TABLE[alice_basis]
        else:
            set_draw = (u[:, SLOT_SET_DRAW] >= 0.5).astype(np.int64)
            drawn_set = SET_BY_BOB_TABLE[bob_basis, set_draw]
            announced = np.where(differ, drawn_set, NO_SET)
            in_set = MEMBERSHIP_TABLE[drawn_set, alice_basis]
            key = differ & in_set
            set_miss = differ & ~in_set
            decoded = BIT_TABLE[drawn_set, OTHER_TABLE[drawn_set, bob_basis]]
            # alice's basis may be outside the drawn set; only key bits read it
            intended = BIT_TABLE[drawn_set, alice_basis]

        tested = u[:, SLOT_TEST_SELECT] < test_fraction
        tested_key = key & tested
        same_tested = same_basis & tested

        counts = {
            "photons_sent": count,
            "key_bits": int(np.count_nonzero(key)),
            "tested_bits": int(np.count_nonzero(tested_key)),
            "wrong_test_bits": int(np.count_nonzero(tested_key & (decoded != intended))),
            "same_basis_tested": int(np.count_nonzero(same_tested)),
            "index_errors_same_basis": int(np.count_nonzero(same_tested & differ)),
            "discarded_set_miss": int(np.count_nonzero(set_miss)),
            "noise_events": int(np.count_nonzero(noise_applied)),
        }
        self.logger.debug(f"Block {block_id}: {counts['key_bits']} key bits of {count}")

        arrays = None
        if keep_arrays:
            arrays = {
                "photon_index": block_id * STREAM_BLOCK + np.arange(count),
                "alice_basis": alice_basis,
                "alice_index": alice_index,
                "eve_index": eve_index,
                "noise_applied": noise_applied,
                "bob_basis": bob_basis,
                "bob_index": bob_index,
                "announced": announced,
                "key": key,
                "set_miss": set_miss,
                "decoded": decoded,
                "intended": intended,
                "tested": tested,
            }
        return _BlockResult(counts=counts, arrays=arrays)

    def _build_records(self, results: List[_BlockResult]) -> List[PhotonRecord]:
        records: List[PhotonRecord] = []
        for result in results:
            a = result.arrays
            for r in range(len(a["photon_index"])):
                if a["key"][r]:
                    outcome = OutcomeKind.KEY_BIT
                elif a["set_miss"][r]:
                    outcome = OutcomeKind.DISCARDED_SET_MISS
                else:
                    outcome = OutcomeKind.NO_BIT
                is_key = outcome == OutcomeKind.KEY_BIT
                set_code = int(a["announced"][r])
                records.append(PhotonRecord(
                    photon_index=int(a["photon_index"][r]),
                    alice_basis=BASIS_ORDER[int(a["alice_basis"][r])],
                    alice_index=int(a["alice_index"][r]),
                    eve_index=None if a["eve_index"] is None else int(a["eve_index"][r]),
                    noise_applied=bool(a["noise_applied"][r]),
                    bob_basis=BASIS_ORDER[int(a["bob_basis"][r])],
                    bob_index=int(a["bob_index"][r]),
                    announced_set=None if set_code == NO_SET else SET_ORDER[set_code],
                    outcome=outcome,
                    decoded=int(a["decoded"][r]) if is_key else None,
                    intended=int(a["intended"][r]) if is_key else None,
                    tested=bool(a["tested"][r]),
                ))
        return records


def run_session(spec: ProtocolSpec, eve: Optional[EveStrategy] = None,
                noise: Optional[NoiseSpec] = None, n_photons: Optional[int] = None,
                test_fraction: Optional[float] = None, seed: int = 0,
                trace: bool = False, max_workers: Optional[int] = None) -> SessionResult:
    """
    Simulate one seeded session.

    Args:
        spec: Protocol and basis angles
        eve: Eavesdropper strategy (absent when None)
        noise: Depolarizing noise (none when None)
        n_photons: Photons sent, defaults to settings.default_photons
        test_fraction: Test-sample probability, defaults to settings.default_test_fraction
        seed: Session seed
        trace: Return the per-photon trace as well
        max_workers: Worker threads; results do not depend on it

    Returns:
        SessionResult
    """
    config = {} if max_workers is None else {'max_workers': max_workers}
    simulator = SessionSimulator(spec, eve, noise, config)
    if n_photons is None:
        n_photons = settings.default_photons
    return simulator.run(n_photons, test_fraction=test_fraction, seed=seed, trace=trace)
