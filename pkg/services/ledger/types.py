"""Ledger types."""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from typing import TYPE_CHECKING, Any

from services.ledger.codec import (
    endorsement_from_dict,
    endorsement_to_dict,
    proposal_from_dict,
    proposal_to_dict,
    rwset_from_dict,
    rwset_to_dict,
)

if TYPE_CHECKING:
    from services.contracts.types import Endorsement, ReadWriteSet, TxProposal

GENESIS_PREV_HASH = bytes(32)


class ValidationCode(StrEnum):
    """Verdict assigned to a transaction when its block commits."""

    VALID = "Valid"
    MVCC_CONFLICT = "MVCCConflict"
    POLICY_FAILURE = "PolicyFailure"


@dataclass(frozen=True, slots=True)
class Transaction:
    """
    An endorsed proposal as carried in a block.

    ``validation_code`` is None while the transaction sits in the orderer and
    is set once, by the committer.
    """

    tx_id: str
    proposal: TxProposal
    rwset: ReadWriteSet
    endorsements: tuple[Endorsement, ...]
    creator_signature: bytes
    validation_code: ValidationCode | None = None

    @property
    def is_valid(self) -> bool:
        """True when committed as Valid."""
        return self.validation_code is ValidationCode.VALID

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready representation."""
        return {
            "tx_id": self.tx_id,
            "proposal": proposal_to_dict(self.proposal),
            "rwset": rwset_to_dict(self.rwset),
            "endorsements": [endorsement_to_dict(e) for e in self.endorsements],
            "creator_signature": self.creator_signature.hex(),
            "validation_code": self.validation_code.value if self.validation_code else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Transaction:
        """Inverse of :meth:`to_dict`."""
        code = data.get("validation_code")
        return cls(
            tx_id=str(data["tx_id"]),
            proposal=proposal_from_dict(data["proposal"]),
            rwset=rwset_from_dict(data["rwset"]),
            endorsements=tuple(endorsement_from_dict(e) for e in data["endorsements"]),
            creator_signature=bytes.fromhex(data["creator_signature"]),
            validation_code=ValidationCode(code) if code is not None else None,
        )


@dataclass(frozen=True, slots=True)
class BlockHeader:
    """Hashed part of a block."""

    height: int
    prev_hash: bytes
    data_hash: bytes
    timestamp: int


@dataclass(frozen=True, slots=True)
class Block:
    """A header, its ordered transactions and the stored header hash."""

    header: BlockHeader
    txs: tuple[Transaction, ...]
    block_hash: bytes

    @property
    def height(self) -> int:
        """Block height."""
        return self.header.height

    @property
    def timestamp(self) -> int:
        """Orderer clock at cut time."""
        return self.header.timestamp

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready representation; byte fields are hex."""
        return {
            "height": self.header.height,
            "prev_hash": self.header.prev_hash.hex(),
            "data_hash": self.header.data_hash.hex(),
            "timestamp": self.header.timestamp,
            "block_hash": self.block_hash.hex(),
            "txs": [tx.to_dict() for tx in self.txs],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Block:
        """Inverse of :meth:`to_dict`."""
        header = BlockHeader(
            height=int(data["height"]),
            prev_hash=bytes.fromhex(data["prev_hash"]),
            data_hash=bytes.fromhex(data["data_hash"]),
            timestamp=int(data["timestamp"]),
        )
        return cls(
            header=header,
            txs=tuple(Transaction.from_dict(tx) for tx in data["txs"]),
            block_hash=bytes.fromhex(data["block_hash"]),
        )


@dataclass(frozen=True, slots=True)
class HistoryItem:
    """One Valid write to a key."""

    tx_id: str
    creator: str
    block_timestamp: int
    value: bytes
    version: tuple[int, int]

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready representation."""
        return {
            "tx_id": self.tx_id,
            "creator": self.creator,
            "block_timestamp": self.block_timestamp,
            "value": self.value.hex(),
            "version": f"{self.version[0]}.{self.version[1]}",
        }


@dataclass(frozen=True, slots=True)
class Attempt:
    """A committed transaction, valid or not, that touched a key."""

    tx_id: str
    creator: str
    action: str
    block_timestamp: int
    validation_code: ValidationCode

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready representation."""
        return {
            "tx_id": self.tx_id,
            "actor": self.creator,
            "action": self.action,
            "block_timestamp": self.block_timestamp,
            "validation_code": self.validation_code.value,
        }


@dataclass(frozen=True, slots=True)
class ChainVerdict:
    """Result of verifying a chain; ``first_bad_height`` is None when intact."""

    first_bad_height: int | None = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        """True when no inconsistency was found."""
        return self.first_bad_height is None
