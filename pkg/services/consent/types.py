"""Types for the consent state machine."""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum


class ConsentState(StrEnum):
    """States of a consent record."""

    NOT_REQUESTED = "NotRequested"
    REQUESTED = "Requested"
    GRANTED = "Granted"
    DENIED = "Denied"
    REVOKED = "Revoked"


class Decision(StrEnum):
    """A data subject's answer to a consent request."""

    GRANT = "grant"
    DENY = "deny"


TRANSITIONS: dict[ConsentState, frozenset[ConsentState]] = {
    ConsentState.NOT_REQUESTED: frozenset({ConsentState.REQUESTED}),
    ConsentState.REQUESTED: frozenset({ConsentState.GRANTED, ConsentState.DENIED}),
    ConsentState.GRANTED: frozenset({ConsentState.REVOKED}),
    ConsentState.DENIED: frozenset({ConsentState.REQUESTED}),
    ConsentState.REVOKED: frozenset({ConsentState.REQUESTED}),
}


@dataclass(frozen=True, slots=True)
class HistoryEntry:
    """One transition: the state entered, when, and who caused it."""

    state: ConsentState
    timestamp: int
    actor: str


@dataclass(frozen=True, slots=True)
class ConsentRecord:
    """
    Consent of one subject for one declaration.

    Attributes:
        subject: On-chain handle of the data subject.
        declaration_hash: Hash of the declaration consented to.
        state: Current state; always the state of the last history entry.
        history: Every transition, oldest first.
        granted_at: Timestamp of the latest grant.
        revoked_at: Timestamp of the latest revocation.
    """

    subject: str
    declaration_hash: bytes
    state: ConsentState = ConsentState.NOT_REQUESTED
    history: tuple[HistoryEntry, ...] = ()
    granted_at: int | None = None
    revoked_at: int | None = None

    @classmethod
    def initial(cls, subject: str, declaration_hash: bytes) -> ConsentRecord:
        """Return a record nobody has acted on yet."""
        return cls(subject=subject, declaration_hash=declaration_hash)

    @property
    def last_timestamp(self) -> int | None:
        """Timestamp of the latest transition."""
        return self.history[-1].timestamp if self.history else None

    def to_dict(self) -> dict[str, object]:
        """Return a JSON-ready view."""
        return {
            "subject": self.subject,
            "declaration_hash": self.declaration_hash.hex(),
            "state": self.state.value,
            "granted_at": self.granted_at,
            "revoked_at": self.revoked_at,
            "history": [
                {"state": entry.state.value, "timestamp": entry.timestamp, "actor": entry.actor}
                for entry in self.history
            ],
        }
