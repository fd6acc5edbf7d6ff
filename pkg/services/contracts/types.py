"""Types for contract execution and endorsement."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from services.ledger.state import Version


class ContractName(StrEnum):
    """Built-in contracts."""

    CONSENT = "consent"
    DATA = "data"
    AUDIT = "audit"


@dataclass(frozen=True, slots=True)
class TxProposal:
    """
    A signed request to run one contract action.

    Attributes:
        proposal_id: Unique per network run.
        creator: On-chain handle of the submitting actor.
        contract: Contract to run.
        action: Dotted action name, e.g. ``consent.respond``.
        args: String arguments.
        client_timestamp: Submitter's clock; contracts use it as ``now``.
    """

    proposal_id: str
    creator: str
    contract: ContractName
    action: str
    args: tuple[str, ...]
    client_timestamp: int

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-ready view."""
        return {
            "proposal_id": self.proposal_id,
            "creator": self.creator,
            "contract": self.contract.value,
            "action": self.action,
            "args": list(self.args),
            "client_timestamp": self.client_timestamp,
        }


@dataclass(frozen=True, slots=True)
class ReadWriteSet:
    """
    Keys read (with observed versions) and values written by a simulation.

    Both lists are sorted by key and free of duplicates.
    """

    reads: tuple[tuple[str, Version | None], ...] = ()
    writes: tuple[tuple[str, bytes], ...] = ()

    def __post_init__(self) -> None:
        """Enforce unique, sorted keys."""
        for name, items in (("reads", self.reads), ("writes", self.writes)):
            keys = [key for key, _ in items]
            if keys != sorted(set(keys)):
                msg = f"{name} must have unique keys in lexicographic order"
                raise ValueError(msg)

    @property
    def is_read_only(self) -> bool:
        """True when nothing is written."""
        return not self.writes

    def touches(self, key: str) -> bool:
        """True when ``key`` is read or written."""
        return any(k == key for k, _ in self.reads) or any(k == key for k, _ in self.writes)

    def written(self, key: str) -> bytes | None:
        """Value written to ``key`` or None."""
        for k, value in self.writes:
            if k == key:
                return value
        return None


@dataclass(frozen=True, slots=True)
class Endorsement:
    """An endorser's signature over ``proposal_id || rwset_digest``."""

    endorser: str
    rwset_digest: bytes
    signature: bytes


@dataclass(frozen=True, slots=True)
class EndorsementPolicy:
    """At least ``k`` distinct members of ``endorser_set`` must endorse."""

    k: int
    endorser_set: frozenset[str]

    def __post_init__(self) -> None:
        """Validate ``1 <= k <= |endorser_set|``."""
        if not 1 <= self.k <= len(self.endorser_set):
            msg = f"k must be between 1 and {len(self.endorser_set)}, got {self.k}"
            raise ValueError(msg)


@dataclass(frozen=True, slots=True)
class SimulationResult:
    """Outcome of a successful simulation."""

    rwset: ReadWriteSet
    response: dict[str, Any] = field(default_factory=dict)
