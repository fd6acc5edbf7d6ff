"""
Canonical byte encodings for proposals, read-write sets and blocks.

Every hash in the ledger is taken over bytes produced here. Text values that
may contain separators are percent-escaped (``%``, ``,`` and newlines) so a
list renders unambiguously as a comma-joined line.
"""

from __future__ import annotations

import hashlib
import json
from typing import TYPE_CHECKING, Any

from services.contracts.types import (
    ContractName,
    Endorsement,
    ReadWriteSet,
    TxProposal,
)
from services.ledger.state import Version

if TYPE_CHECKING:
    from collections.abc import Iterable

_ESCAPES = (("%", "%25"), (",", "%2C"), ("\n", "%0A"), ("\r", "%0D"))


def escape(value: str) -> str:
    """Percent-escape list separators."""
    for raw, quoted in _ESCAPES:
        value = value.replace(raw, quoted)
    return value


def join_escaped(items: Iterable[str]) -> str:
    """Comma-join escaped items."""
    return ",".join(escape(item) for item in items)


def proposal_bytes(proposal: TxProposal) -> bytes:
    """Canonical bytes of a proposal; the transaction id hashes these."""
    lines = (
        f"id:{escape(proposal.proposal_id)}\n"
        f"creator:{escape(proposal.creator)}\n"
        f"contract:{proposal.contract.value}\n"
        f"action:{escape(proposal.action)}\n"
        f"args:{join_escaped(proposal.args)}\n"
        f"time:{proposal.client_timestamp}\n"
    )
    return lines.encode("utf-8")


def compute_tx_id(proposal: TxProposal) -> str:
    """``hex(SHA-256(canonical proposal bytes))``."""
    return hashlib.sha256(proposal_bytes(proposal)).hexdigest()


def rwset_bytes(rwset: ReadWriteSet) -> bytes:
    """Canonical bytes of a read-write set."""
    parts = [
        f"read:{escape(key)}@{version.render() if version is not None else '-'}\n"
        for key, version in rwset.reads
    ]
    parts.extend(f"write:{escape(key)}={value.hex()}\n" for key, value in rwset.writes)
    return "".join(parts).encode("utf-8")


def rwset_digest(rwset: ReadWriteSet) -> bytes:
    """32-byte SHA-256 of the canonical read-write set."""
    return hashlib.sha256(rwset_bytes(rwset)).digest()


def endorsement_message(proposal_id: str, digest: bytes) -> bytes:
    """Bytes an endorser signs: ``proposal_id || rwset_digest``."""
    return proposal_id.encode("utf-8") + digest


def proposal_to_dict(proposal: TxProposal) -> dict[str, Any]:
    """JSON-ready proposal."""
    return proposal.to_dict()


def proposal_from_dict(data: dict[str, Any]) -> TxProposal:
    """Inverse of :func:`proposal_to_dict`."""
    return TxProposal(
        proposal_id=str(data["proposal_id"]),
        creator=str(data["creator"]),
        contract=ContractName(data["contract"]),
        action=str(data["action"]),
        args=tuple(str(arg) for arg in data["args"]),
        client_timestamp=int(data["client_timestamp"]),
    )


def rwset_to_dict(rwset: ReadWriteSet) -> dict[str, Any]:
    """JSON-ready read-write set; values are hex."""
    return {
        "reads": [
            [key, version.render() if version is not None else None]
            for key, version in rwset.reads
        ],
        "writes": [[key, value.hex()] for key, value in rwset.writes],
    }


def rwset_from_dict(data: dict[str, Any]) -> ReadWriteSet:
    """Inverse of :func:`rwset_to_dict`."""
    return ReadWriteSet(
        reads=tuple(
            (str(key), Version.parse(version) if version is not None else None)
            for key, version in data["reads"]
        ),
        writes=tuple((str(key), bytes.fromhex(value)) for key, value in data["writes"]),
    )


def endorsement_to_dict(endorsement: Endorsement) -> dict[str, str]:
    """JSON-ready endorsement."""
    return {
        "endorser": endorsement.endorser,
        "rwset_digest": endorsement.rwset_digest.hex(),
        "signature": endorsement.signature.hex(),
    }


def endorsement_from_dict(data: dict[str, str]) -> Endorsement:
    """Inverse of :func:`endorsement_to_dict`."""
    return Endorsement(
        endorser=data["endorser"],
        rwset_digest=bytes.fromhex(data["rwset_digest"]),
        signature=bytes.fromhex(data["signature"]),
    )


def canonical_json(data: Any) -> bytes:
    """Compact, key-sorted UTF-8 JSON."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode(
        "utf-8"
    )
