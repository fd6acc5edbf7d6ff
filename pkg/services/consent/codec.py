"""
Canonical serialization of consent records.

Same rendering rules as declarations: fixed key order, ``key:value`` lines,
list values comma-joined without spaces. History entries render as
``state@timestamp@actor``.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from core.errors import ErrorCode, governance_error
from core.result import Failure, failure, success
from services.consent.types import ConsentRecord, ConsentState, HistoryEntry
from services.legalprose.lines import parse_key_values, split_list

if TYPE_CHECKING:
    from core.result import Outcome

RECORD_KEYS: tuple[str, ...] = (
    "subject",
    "declaration",
    "state",
    "granted_at",
    "revoked_at",
    "history",
)


def consent_key(subject: str, declaration_hash: bytes) -> str:
    """World-state key of a consent record."""
    return f"consent/{subject}/{declaration_hash.hex()}"


def _optional(value: int | None) -> str:
    return "-" if value is None else str(value)


def encode_record(record: ConsentRecord) -> bytes:
    """Render the canonical bytes of a record."""
    history = ",".join(
        f"{entry.state.value}@{entry.timestamp}@{entry.actor}" for entry in record.history
    )
    values = (
        record.subject,
        record.declaration_hash.hex(),
        record.state.value,
        _optional(record.granted_at),
        _optional(record.revoked_at),
        history,
    )
    text = "".join(f"{key}:{value}\n" for key, value in zip(RECORD_KEYS, values, strict=True))
    return text.encode("utf-8")


def decode_record(data: bytes) -> Outcome[ConsentRecord]:
    """Parse canonical record bytes."""
    parsed = parse_key_values(data.decode("utf-8"), RECORD_KEYS, RECORD_KEYS)
    if isinstance(parsed, Failure):
        return parsed
    values = parsed.value
    try:
        history = tuple(_decode_entry(item) for item in split_list(values["history"]))
        record = ConsentRecord(
            subject=values["subject"],
            declaration_hash=bytes.fromhex(values["declaration"]),
            state=ConsentState(values["state"]),
            history=history,
            granted_at=None if values["granted_at"] == "-" else int(values["granted_at"]),
            revoked_at=None if values["revoked_at"] == "-" else int(values["revoked_at"]),
        )
    except ValueError as exc:
        return failure(governance_error(ErrorCode.MALFORMED_RECORD, f"consent record: {exc}"))
    return success(record)


def _decode_entry(item: str) -> HistoryEntry:
    state, timestamp, actor = item.split("@", 2)
    return HistoryEntry(state=ConsentState(state), timestamp=int(timestamp), actor=actor)
