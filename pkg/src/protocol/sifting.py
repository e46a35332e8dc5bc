"""
Sifting rules: how Bob turns a measurement with a differing index into a key
bit, for KMB09 (two bases) and for the three-basis variant.

Both protocols share one decoding idea. A key bit is only produced when
Alice's and Bob's indices differ, in which case Bob concludes the photon was
prepared in the *other* basis of the pair he considers, and reads that basis's
bit. Alice's intended bit is the bit of the basis she actually used.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from src.quantum.qstate import BasisLabel
from src.utils.exceptions import ContractViolationError

E, F, H = BasisLabel.E, BasisLabel.F, BasisLabel.H


class OutcomeKind(Enum):
    """Result of sifting one photon."""
    NO_BIT = "NO_BIT"
    KEY_BIT = "KEY_BIT"
    DISCARDED_SET_MISS = "DISCARDED_SET_MISS"


class BasisPairSet(Enum):
    """The three basis pairs Bob may announce in the variant protocol."""
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"

    @property
    def members(self) -> Tuple[BasisLabel, BasisLabel]:
        return SET_MEMBERS[self]

    def contains(self, label: BasisLabel) -> bool:
        return label in SET_MEMBERS[self]

    def bit_for(self, label: BasisLabel) -> int:
        """Bit the basis encodes when this set is announced."""
        try:
            return SET_ENCODING[self][label]
        except KeyError as e:
            raise ContractViolationError(f"{label.value} is not a member of {self.value}") from e

    def other(self, label: BasisLabel) -> BasisLabel:
        """The member of the set that is not ``label``."""
        first, second = SET_MEMBERS[self]
        if label == first:
            return second
        if label == second:
            return first
        raise ContractViolationError(f"{label.value} is not a member of {self.value}")


SET_MEMBERS: Dict[BasisPairSet, Tuple[BasisLabel, BasisLabel]] = {
    BasisPairSet.S1: (E, F),
    BasisPairSet.S2: (E, H),
    BasisPairSet.S3: (F, H),
}

SET_ENCODING: Dict[BasisPairSet, Dict[BasisLabel, int]] = {
    BasisPairSet.S1: {E: 0, F: 1},
    BasisPairSet.S2: {E: 0, H: 1},
    BasisPairSet.S3: {F: 0, H: 1},
}

# the two sets containing each basis, indexed by Bob's set draw
SETS_CONTAINING: Dict[BasisLabel, Tuple[BasisPairSet, BasisPairSet]] = {
    E: (BasisPairSet.S1, BasisPairSet.S2),
    F: (BasisPairSet.S1, BasisPairSet.S3),
    H: (BasisPairSet.S2, BasisPairSet.S3),
}

KMB09_ENCODING: Dict[BasisLabel, int] = {E: 0, F: 1}


@dataclass(frozen=True)
class SiftOutcome:
    """Outcome of sifting together with the bits of both parties."""
    kind: OutcomeKind
    decoded: Optional[int] = None
    intended: Optional[int] = None
    announced_set: Optional[BasisPairSet] = None

    @property
    def is_key_bit(self) -> bool:
        return self.kind == OutcomeKind.KEY_BIT

    @property
    def is_error(self) -> bool:
        return self.is_key_bit and self.decoded != self.intended


def _check_index(index: int) -> None:
    if index not in (1, 2):
        raise ContractViolationError(f"State index must be 1 or 2, got {index!r}")


def sift_kmb09(alice_basis: BasisLabel, alice_index: int,
               bob_basis: BasisLabel, bob_index: int) -> SiftOutcome:
    """
    Interpret one KMB09 photon after Alice announced her index.

    Bob reads 1 after measuring e and 0 after measuring f whenever the
    indices differ; Alice's e means 0 and f means 1.
    """
    for label in (alice_basis, bob_basis):
        if label not in KMB09_ENCODING:
            raise ContractViolationError(f"KMB09 uses bases E and F only, got {label!r}")
    _check_index(alice_index)
    _check_index(bob_index)

    if alice_index == bob_index:
        return SiftOutcome(OutcomeKind.NO_BIT)

    other = F if bob_basis == E else E
    return SiftOutcome(
        OutcomeKind.KEY_BIT,
        decoded=KMB09_ENCODING[other],
        intended=KMB09_ENCODING[alice_basis],
    )


def sift_variant(alice_basis: BasisLabel, alice_index: int,
                 bob_basis: BasisLabel, bob_index: int, set_draw: int) -> SiftOutcome:
    """
    Interpret one photon of the three-basis variant.

    Args:
        alice_basis: Basis Alice prepared in
        alice_index: Index of Alice's state
        bob_basis: Basis Bob measured in
        bob_index: Index Bob found
        set_draw: Uniform bit choosing between the two sets containing Bob's basis

    Returns:
        SiftOutcome; ``announced_set`` is set whenever the indices differ
    """
    if alice_basis not in SETS_CONTAINING or bob_basis not in SETS_CONTAINING:
        raise ContractViolationError("Variant bases must be E, F or H")
    _check_index(alice_index)
    _check_index(bob_index)
    if set_draw not in (0, 1):
        raise ContractViolationError(f"set_draw must be 0 or 1, got {set_draw!r}")

    if alice_index == bob_index:
        return SiftOutcome(OutcomeKind.NO_BIT)

    announced = SETS_CONTAINING[bob_basis][set_draw]
    if not announced.contains(alice_basis):
        return SiftOutcome(OutcomeKind.DISCARDED_SET_MISS, announced_set=announced)

    return SiftOutcome(
        OutcomeKind.KEY_BIT,
        decoded=announced.bit_for(announced.other(bob_basis)),
        intended=announced.bit_for(alice_basis),
        announced_set=announced,
    )


# Integer lookup tables for the vectorized session engine.
# Basis codes follow BASIS_ORDER; set codes follow SET_ORDER.

BASIS_ORDER: Tuple[BasisLabel, ...] = (E, F, H)
SET_ORDER: Tuple[BasisPairSet, ...] = (BasisPairSet.S1, BasisPairSet.S2, BasisPairSet.S3)
NO_SET = -1


def _build_tables():
    basis_code = {label: code for code, label in enumerate(BASIS_ORDER)}
    set_code = {s: code for code, s in enumerate(SET_ORDER)}

    set_by_bob = np.zeros((3, 2), dtype=np.int64)
    for label, sets in SETS_CONTAINING.items():
        for draw, s in enumerate(sets):
            set_by_bob[basis_code[label], draw] = set_code[s]

    membership = np.zeros((3, 3), dtype=bool)
    bit_table = np.full((3, 3), -1, dtype=np.int64)
    other_table = np.full((3, 3), -1, dtype=np.int64)
    for s in SET_ORDER:
        for label in s.members:
            membership[set_code[s], basis_code[label]] = True
            bit_table[set_code[s], basis_code[label]] = s.bit_for(label)
            other_table[set_code[s], basis_code[label]] = basis_code[s.other(label)]

    kmb09_intended = np.array([KMB09_ENCODING[E], KMB09_ENCODING[F]], dtype=np.int64)
    kmb09_decoded = np.array([KMB09_ENCODING[F], KMB09_ENCODING[E]], dtype=np.int64)
    return set_by_bob, membership, bit_table, other_table, kmb09_intended, kmb09_decoded


(SET_BY_BOB_TABLE, MEMBERSHIP_TABLE, BIT_TABLE, OTHER_TABLE,
 KMB09_INTENDED_TABLE, KMB09_DECODED_TABLE) = _build_tables()
