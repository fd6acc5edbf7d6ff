"""Canonical encoding of record refs and erasure markers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from core.errors import ErrorCode, governance_error
from core.result import Failure, failure, success
from services.legalprose.lines import parse_key_values, split_list
from services.pipeline.types import HealthRecordPayload, HealthRecordRef

if TYPE_CHECKING:
    from core.result import Outcome
    from services.ledger.state import Version

REF_KEYS: tuple[str, ...] = (
    "payload_hash",
    "subject_pseudo",
    "declaration",
    "submitted_by",
    "submitted_at",
    "fields",
    "supersedes",
)


@dataclass(frozen=True, slots=True)
class ErasureMarker:
    """Who erased a payload and when."""

    erased_at: int
    erased_by: str


def encode_ref(ref: HealthRecordRef) -> bytes:
    """Canonical bytes of a ref; the locator is not part of the value."""
    values = (
        ref.payload_hash.hex(),
        ref.subject_pseudo.hex(),
        ref.declaration_hash.hex(),
        ref.submitted_by,
        str(ref.submitted_at),
        ",".join(sorted(ref.fields)),
        ref.supersedes.hex() if ref.supersedes is not None else "-",
    )
    text = "".join(f"{key}:{value}\n" for key, value in zip(REF_KEYS, values, strict=True))
    return text.encode("utf-8")


def decode_ref(data: bytes, locator: Version | None = None) -> Outcome[HealthRecordRef]:
    """Parse canonical ref bytes."""
    parsed = parse_key_values(data.decode("utf-8"), REF_KEYS, REF_KEYS)
    if isinstance(parsed, Failure):
        return parsed
    values = parsed.value
    try:
        ref = HealthRecordRef(
            payload_hash=bytes.fromhex(values["payload_hash"]),
            subject_pseudo=bytes.fromhex(values["subject_pseudo"]),
            declaration_hash=bytes.fromhex(values["declaration"]),
            submitted_by=values["submitted_by"],
            submitted_at=int(values["submitted_at"]),
            fields=tuple(split_list(values["fields"])),
            supersedes=None if values["supersedes"] == "-" else bytes.fromhex(values["supersedes"]),
            locator=locator,
        )
    except ValueError as exc:
        return failure(governance_error(ErrorCode.MALFORMED_RECORD, f"record ref: {exc}"))
    return success(ref)


def encode_erasure(marker: ErasureMarker) -> bytes:
    """Canonical bytes of an erasure marker."""
    return f"erased_at:{marker.erased_at}\nerased_by:{marker.erased_by}\n".encode()


def decode_payload(data: bytes) -> Outcome[HealthRecordPayload]:
    """Parse canonical payload lines."""
    values: dict[str, str] = {}
    for line in data.decode("utf-8").splitlines():
        name, sep, value = line.partition("=")
        if not sep or name in values:
            return failure(governance_error(ErrorCode.MALFORMED_RECORD, f"payload line: {line}"))
        values[name] = value
    try:
        return success(HealthRecordPayload.from_mapping(values))
    except ValueError as exc:
        return failure(governance_error(ErrorCode.MALFORMED_RECORD, str(exc)))
