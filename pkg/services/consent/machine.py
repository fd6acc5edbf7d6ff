"""
Consent transitions and point-in-time queries.

Grant is reachable only from Requested, so consent is never inferred from
silence: a record nobody answered stays Requested forever and no timeout moves
it. Failed operations return the error and leave the record untouched.
"""

from __future__ import annotations

import bisect
from dataclasses import replace
from typing import TYPE_CHECKING

from core.errors import ErrorCode, GovernanceError, governance_error, illegal_transition
from core.result import Failure, failure, success
from services.consent.types import (
    TRANSITIONS,
    ConsentRecord,
    ConsentState,
    Decision,
    HistoryEntry,
)
from services.identity.types import Role

if TYPE_CHECKING:
    from collections.abc import Collection, Iterable

    from core.result import Outcome


def _advance(
    record: ConsentRecord,
    target: ConsentState,
    actor: str,
    now: int,
) -> Outcome[ConsentRecord]:
    """Append a transition after checking legality and timestamp order."""
    if target not in TRANSITIONS[record.state]:
        return failure(illegal_transition(record.state.value, target.value))
    last = record.last_timestamp
    if last is not None and now < last:
        return failure(
            governance_error(
                ErrorCode.NON_MONOTONIC_TIMESTAMP,
                f"timestamp {now} precedes last transition at {last}",
            )
        )
    updated = replace(
        record,
        state=target,
        history=(*record.history, HistoryEntry(state=target, timestamp=now, actor=actor)),
    )
    if target is ConsentState.GRANTED:
        updated = replace(updated, granted_at=now)
    elif target is ConsentState.REVOKED:
        updated = replace(updated, revoked_at=now)
    return success(updated)


def request_consent(
    record: ConsentRecord,
    controller_id: str,
    now: int,
    controller_roles: Collection[Role],
) -> Outcome[ConsentRecord]:
    """
    Ask the subject for consent.

    Args:
        record: Current record.
        controller_id: Handle of the requesting controller.
        now: Transaction timestamp.
        controller_roles: Roles the requester holds.

    Returns:
        Result with the Requested record, or NotAController, IllegalTransition.
    """
    if Role.DATA_CONTROLLER not in controller_roles:
        return failure(
            governance_error(ErrorCode.NOT_A_CONTROLLER, f"{controller_id} is not a controller")
        )
    return _advance(record, ConsentState.REQUESTED, controller_id, now)


def _not_the_subject(record: ConsentRecord, subject_id: str) -> GovernanceError | None:
    if subject_id != record.subject:
        return governance_error(
            ErrorCode.NOT_THE_SUBJECT, "only the data subject can act on this record"
        )
    return None


def respond_consent(
    record: ConsentRecord,
    subject_id: str,
    decision: Decision,
    now: int,
) -> Outcome[ConsentRecord]:
    """
    Record the subject's answer to a pending request.

    Returns:
        Result with the Granted or Denied record, or NotTheSubject,
        IllegalTransition.
    """
    if (error := _not_the_subject(record, subject_id)) is not None:
        return failure(error)
    target = ConsentState.GRANTED if decision is Decision.GRANT else ConsentState.DENIED
    return _advance(record, target, subject_id, now)


def revoke_consent(record: ConsentRecord, subject_id: str, now: int) -> Outcome[ConsentRecord]:
    """
    Withdraw a grant in a single step; no counterparty approval exists.

    Returns:
        Result with the Revoked record, or NotTheSubject, IllegalTransition.
    """
    if (error := _not_the_subject(record, subject_id)) is not None:
        return failure(error)
    return _advance(record, ConsentState.REVOKED, subject_id, now)


def consent_status_at(record: ConsentRecord, t: int) -> ConsentState:
    """
    State in force at time ``t``.

    A transition takes effect at its own timestamp, inclusive.
    """
    timestamps = [entry.timestamp for entry in record.history]
    index = bisect.bisect_right(timestamps, t)
    if index == 0:
        return ConsentState.NOT_REQUESTED
    return record.history[index - 1].state


def is_access_permitted(record: ConsentRecord, declaration_hash: bytes, t: int) -> bool:
    """Processing is allowed only for the consented declaration while Granted."""
    return (
        record.declaration_hash == declaration_hash
        and consent_status_at(record, t) is ConsentState.GRANTED
    )


def replay_history(
    subject: str,
    declaration_hash: bytes,
    history: Iterable[HistoryEntry],
) -> Outcome[ConsentRecord]:
    """
    Rebuild a record from its transitions.

    Every entry is re-checked against the state machine, so a history that
    could not have been produced by the operations above is rejected.
    """
    record = ConsentRecord.initial(subject, declaration_hash)
    for entry in history:
        step = _advance(record, entry.state, entry.actor, entry.timestamp)
        if isinstance(step, Failure):
            return step
        record = step.value
    return success(record)
