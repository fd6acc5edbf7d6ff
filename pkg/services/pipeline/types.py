"""Types for governed health-record ingestion."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from services.legalprose.types import FIELD_NAME

if TYPE_CHECKING:
    from collections.abc import Mapping

    from services.ledger.state import Version


@dataclass(frozen=True, slots=True)
class HealthRecordPayload:
    """
    Field values of one health record. Stored off-chain only.

    ``values`` is sorted by field name.
    """

    values: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        """Validate field names and value characters."""
        names = [name for name, _ in self.values]
        if names != sorted(set(names)):
            msg = "payload fields must be unique and sorted"
            raise ValueError(msg)
        for name, value in self.values:
            if not FIELD_NAME.fullmatch(name):
                msg = f"invalid field name: {name!r}"
                raise ValueError(msg)
            if "\n" in value or "\r" in value:
                msg = f"value of {name} spans lines"
                raise ValueError(msg)

    @classmethod
    def from_mapping(cls, values: Mapping[str, str]) -> HealthRecordPayload:
        """Build from an unordered mapping."""
        return cls(values=tuple(sorted(values.items())))

    @property
    def field_names(self) -> tuple[str, ...]:
        """Sorted field names."""
        return tuple(name for name, _ in self.values)

    def get(self, name: str) -> str | None:
        """Value of ``name`` or None."""
        return dict(self.values).get(name)

    def canonical_bytes(self) -> bytes:
        """Sorted ``field=value`` lines."""
        return "".join(f"{name}={value}\n" for name, value in self.values).encode("utf-8")

    def payload_hash(self) -> bytes:
        """SHA-256 of the canonical lines."""
        return hashlib.sha256(self.canonical_bytes()).digest()

    def to_dict(self) -> dict[str, str]:
        """Field mapping."""
        return dict(self.values)


@dataclass(frozen=True, slots=True)
class HealthRecordRef:
    """
    On-chain reference to an off-chain payload.

    Holds field names but never values, and the subject only as a salted
    pseudonym. ``locator`` is the version of the committing transaction.
    """

    payload_hash: bytes
    subject_pseudo: bytes
    declaration_hash: bytes
    submitted_by: str
    submitted_at: int
    fields: tuple[str, ...]
    supersedes: bytes | None = None
    locator: Version | None = None

    @property
    def key(self) -> str:
        """World-state key of the ref."""
        return record_key(self.subject_pseudo, self.payload_hash)

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready representation."""
        return {
            "key": self.key,
            "payload_hash": self.payload_hash.hex(),
            "subject_pseudo": self.subject_pseudo.hex(),
            "declaration_hash": self.declaration_hash.hex(),
            "submitted_by": self.submitted_by,
            "submitted_at": self.submitted_at,
            "fields": list(self.fields),
            "supersedes": self.supersedes.hex() if self.supersedes else None,
            "locator": self.locator.render() if self.locator else None,
        }


@dataclass(frozen=True, slots=True)
class OwnRecord:
    """A ref joined with its payload; ``payload`` is None once erased."""

    ref: HealthRecordRef
    payload: HealthRecordPayload | None
    erased: bool

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready representation."""
        return {
            "ref": self.ref.to_dict(),
            "payload": self.payload.to_dict() if self.payload else None,
            "erased": self.erased,
        }


def record_key(subject_pseudo: bytes, payload_hash: bytes) -> str:
    """``record/<subject_pseudo_hex>/<payload_hash_hex>``."""
    return f"record/{subject_pseudo.hex()}/{payload_hash.hex()}"


def erasure_key(subject_pseudo: bytes, payload_hash: bytes) -> str:
    """Key of the erasure marker for a record."""
    return f"erasure/{subject_pseudo.hex()}/{payload_hash.hex()}"


def parse_record_key(key: str) -> tuple[bytes, bytes] | None:
    """Split a record key into ``(subject_pseudo, payload_hash)``."""
    prefix, _, rest = key.partition("/")
    pseudo_hex, _, payload_hex = rest.partition("/")
    if prefix != "record" or len(pseudo_hex) != 64 or len(payload_hex) != 64:
        return None
    try:
        return bytes.fromhex(pseudo_hex), bytes.fromhex(payload_hex)
    except ValueError:
        return None


@dataclass(frozen=True, slots=True)
class PipelineConfig:
    """
    Processing limits.

    Attributes:
        k_anonymity: Aggregate groups smaller than this are suppressed.
        day_seconds: Length of a retention day in timestamp units.
        permissioned: Whether aggregate queries need a registered requester.
    """

    k_anonymity: int = 2
    day_seconds: int = 86_400
    permissioned: bool = False

    def __post_init__(self) -> None:
        """Validate limits."""
        if self.k_anonymity < 1:
            msg = "k_anonymity must be at least 1"
            raise ValueError(msg)
        if self.day_seconds < 1:
            msg = "day_seconds must be at least 1"
            raise ValueError(msg)
