"""
Public classical channel of a session.

The announcements are emitted phase by phase, the way the protocol runs:

    step 4  Alice announces the index of every photon
    step 5  Bob flags the photons whose index differs from Alice's
            (variant: together with a basis-pair set containing his basis)
    step 6  Alice says whether each announced set contains her basis (variant only)
    step 7  for the test photons both reveal their bases, and the bits of
            test photons that carry a key bit
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Sequence

from src.protocol.session import PhotonRecord, ProtocolKind
from src.protocol.sifting import OutcomeKind
from src.utils.exceptions import ContractViolationError


class Party(Enum):
    ALICE = "alice"
    BOB = "bob"


class AnnouncementKind(Enum):
    INDEX = "index"
    DIFFERENT_INDEX = "different_index"
    SET = "set"
    CONFIRMATION = "confirmation"
    TEST_REVEAL = "test_reveal"


STEP_OF_KIND = {
    AnnouncementKind.INDEX: 4,
    AnnouncementKind.DIFFERENT_INDEX: 5,
    AnnouncementKind.SET: 5,
    AnnouncementKind.CONFIRMATION: 6,
    AnnouncementKind.TEST_REVEAL: 7,
}


@dataclass(frozen=True)
class Announcement:
    """One public message about one photon."""
    step: int
    party: Party
    kind: AnnouncementKind
    photon_index: int
    payload: Dict[str, Any] = field(default_factory=dict)


def build_transcript(records: Sequence[PhotonRecord], kind: ProtocolKind) -> List[Announcement]:
    """
    Produce the public transcript of a traced session in protocol order.

    Args:
        records: Per-photon trace of a session
        kind: Protocol the session ran

    Returns:
        Announcements sorted by step, then photon index
    """
    transcript: List[Announcement] = []

    for r in records:
        transcript.append(Announcement(4, Party.ALICE, AnnouncementKind.INDEX, r.photon_index,
                                       {"index": r.alice_index}))

    for r in records:
        if r.alice_index == r.bob_index:
            continue
        if kind == ProtocolKind.VARIANT:
            transcript.append(Announcement(5, Party.BOB, AnnouncementKind.SET, r.photon_index,
                                           {"set": r.announced_set.value}))
        else:
            transcript.append(Announcement(5, Party.BOB, AnnouncementKind.DIFFERENT_INDEX,
                                           r.photon_index))

    if kind == ProtocolKind.VARIANT:
        for r in records:
            if r.announced_set is None:
                continue
            transcript.append(Announcement(
                6, Party.ALICE, AnnouncementKind.CONFIRMATION, r.photon_index,
                {"contains_basis": r.outcome == OutcomeKind.KEY_BIT},
            ))

    for r in records:
        if not r.tested:
            continue
        alice_payload: Dict[str, Any] = {"alice_basis": r.alice_basis.value}
        bob_payload: Dict[str, Any] = {"bob_basis": r.bob_basis.value}
        if r.outcome == OutcomeKind.KEY_BIT:
            alice_payload["bit"] = r.intended
            bob_payload["bit"] = r.decoded
        transcript.append(Announcement(7, Party.ALICE, AnnouncementKind.TEST_REVEAL,
                                       r.photon_index, alice_payload))
        transcript.append(Announcement(7, Party.BOB, AnnouncementKind.TEST_REVEAL,
                                       r.photon_index, bob_payload))

    return transcript


def check_transcript(transcript: Sequence[Announcement]) -> None:
    """
    Verify the ordering rules of the public channel.

    Raises:
        ContractViolationError: If steps go backwards, a message sits at the
            wrong step, Alice's basis is revealed before step 7, or a state
            index is announced anywhere but step 4
    """
    last_step = 0
    for message in transcript:
        if message.step < last_step:
            raise ContractViolationError(
                f"Step {message.step} announcement after step {last_step} "
                f"(photon {message.photon_index})"
            )
        last_step = message.step

        if STEP_OF_KIND[message.kind] != message.step:
            raise ContractViolationError(f"{message.kind.value} announced at step {message.step}")
        if "alice_basis" in message.payload and message.step < 7:
            raise ContractViolationError(
                f"Alice's basis revealed at step {message.step} (photon {message.photon_index})"
            )
        if "index" in message.payload and message.step != 4:
            raise ContractViolationError(
                f"State index revealed at step {message.step} (photon {message.photon_index})"
            )
