"""Consent state machine."""

from services.consent.codec import consent_key, decode_record, encode_record
from services.consent.machine import (
    consent_status_at,
    is_access_permitted,
    replay_history,
    request_consent,
    respond_consent,
    revoke_consent,
)
from services.consent.types import ConsentRecord, ConsentState, Decision, HistoryEntry

__all__ = [
    "ConsentRecord",
    "ConsentState",
    "Decision",
    "HistoryEntry",
    "consent_key",
    "consent_status_at",
    "decode_record",
    "encode_record",
    "is_access_permitted",
    "replay_history",
    "request_consent",
    "respond_consent",
    "revoke_consent",
]
