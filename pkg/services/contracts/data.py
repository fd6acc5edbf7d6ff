"""
Data contract: record submission, supersession and erasure.

Only refs are written on-chain. Checks run in a fixed order (role, consent,
minimization) so the reported error for a given submission is deterministic.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, ClassVar

from core.errors import (
    ErrorCode,
    bad_args,
    consent_required,
    governance_error,
    minimization_violation,
    unknown_key,
)
from core.result import Failure, failure, success
from services.consent.machine import is_access_permitted
from services.contracts.base import (
    BaseContract,
    Response,
    effective_roles,
    expect_args,
    load_declaration,
    parse_digest_hex,
    resolve_creator,
    resolve_subject,
)
from services.contracts.consent import load_consent
from services.contracts.types import ContractName
from services.identity.signing import PSEUDONYM_PREFIX
from services.identity.types import Role
from services.legalprose.declaration import check_field_subset
from services.legalprose.lines import split_list
from services.legalprose.types import FIELD_NAME
from services.pipeline.records import ErasureMarker, decode_ref, encode_erasure, encode_ref
from services.pipeline.types import HealthRecordRef, erasure_key, parse_record_key, record_key

if TYPE_CHECKING:
    from core.errors import GovernanceError
    from core.result import Outcome
    from services.contracts.base import ContractContext

SUBMITTER_ROLES: frozenset[Role] = frozenset({Role.DATA_CONTROLLER, Role.DATA_PROCESSOR})
NO_SUPERSEDE = "-"


def _role_denied(actor_id: str, reason: str) -> Failure[GovernanceError]:
    return failure(governance_error(ErrorCode.ROLE_DENIED, f"{actor_id} {reason}"))


def _erase(ctx: ContractContext, subject_pseudo: bytes, payload_hash: bytes) -> bool:
    """Write an erasure marker unless one exists; True when written."""
    key = erasure_key(subject_pseudo, payload_hash)
    if ctx.state.exists(key):
        return False
    marker = ErasureMarker(erased_at=ctx.now, erased_by=ctx.creator)
    ctx.state.put(key, encode_erasure(marker))
    return True


class DataContract(BaseContract):
    """``data.*`` actions."""

    contract_name: ClassVar[ContractName] = ContractName.DATA
    handlers: ClassVar[dict[str, str]] = {"submit": "submit", "erase": "erase"}

    def submit(self, ctx: ContractContext) -> Outcome[Response]:
        """
        Record a payload ref.

        Args are ``[subject_handle, declaration_hex, payload_hash_hex,
        fields_csv, supersedes_hex or "-"]``.
        """
        if (error := expect_args(ctx, 5)) is not None:
            return error
        handle, declaration_hex, payload_hex, fields_csv, supersedes_hex = ctx.args
        creator = resolve_creator(ctx)
        if isinstance(creator, Failure):
            return creator
        actor = creator.value
        if not SUBMITTER_ROLES & effective_roles(ctx, actor):
            return _role_denied(actor.actor_id, "may not submit records")
        subject = resolve_subject(ctx, handle)
        if isinstance(subject, Failure):
            return subject
        loaded = load_declaration(ctx, declaration_hex)
        if isinstance(loaded, Failure):
            return loaded
        declaration, declaration_hash = loaded.value
        if actor.actor_id not in (declaration.controller, *declaration.processors):
            return _role_denied(actor.actor_id, "is not named by the declaration")

        consent = load_consent(ctx, handle, declaration_hash)
        if isinstance(consent, Failure):
            return consent
        if not is_access_permitted(consent.value, declaration_hash, ctx.now):
            return failure(consent_required(handle, declaration_hash.hex()))

        fields = split_list(fields_csv)
        if not fields:
            return failure(bad_args("a record needs at least one field"))
        bad = [name for name in fields if not FIELD_NAME.fullmatch(name)]
        if bad:
            return failure(
                governance_error(ErrorCode.BAD_FIELD_NAME, f"invalid field names: {bad}", bad)
            )
        extra = check_field_subset(declaration, fields)
        if extra:
            return failure(minimization_violation(extra))

        payload_hash = parse_digest_hex(payload_hex, "payload hash")
        if isinstance(payload_hash, Failure):
            return payload_hash
        subject_pseudo = bytes.fromhex(handle.removeprefix(PSEUDONYM_PREFIX))
        ref = HealthRecordRef(
            payload_hash=payload_hash.value,
            subject_pseudo=subject_pseudo,
            declaration_hash=declaration_hash,
            submitted_by=ctx.creator,
            submitted_at=ctx.now,
            fields=tuple(sorted(set(fields))),
            supersedes=None,
        )
        if ctx.state.exists(ref.key):
            return failure(
                governance_error(ErrorCode.DUPLICATE_RECORD, f"record already exists: {ref.key}")
            )

        response: Response = {"record_key": ref.key, "erased": []}
        if supersedes_hex != NO_SUPERSEDE:
            old_hash = parse_digest_hex(supersedes_hex, "superseded hash")
            if isinstance(old_hash, Failure):
                return old_hash
            old_key = record_key(subject_pseudo, old_hash.value)
            if not ctx.state.exists(old_key):
                return failure(unknown_key(old_key))
            if _erase(ctx, subject_pseudo, old_hash.value):
                response["erased"] = [old_key]
            ref = HealthRecordRef(
                payload_hash=ref.payload_hash,
                subject_pseudo=ref.subject_pseudo,
                declaration_hash=ref.declaration_hash,
                submitted_by=ref.submitted_by,
                submitted_at=ref.submitted_at,
                fields=ref.fields,
                supersedes=old_hash.value,
            )
        ctx.state.put(ref.key, encode_ref(ref))
        return success(response)

    def erase(self, ctx: ContractContext) -> Outcome[Response]:
        """Erase a payload, keeping its ref: ``[record_key]``."""
        if (error := expect_args(ctx, 1)) is not None:
            return error
        key = ctx.args[0]
        parts = parse_record_key(key)
        if parts is None:
            return failure(bad_args(f"not a record key: {key}"))
        raw = ctx.state.get(key)
        if raw is None:
            return failure(unknown_key(key))
        ref = decode_ref(raw)
        if isinstance(ref, Failure):
            return ref
        subject_handle = PSEUDONYM_PREFIX + ref.value.subject_pseudo.hex()
        if ctx.creator != subject_handle:
            loaded = load_declaration(ctx, ref.value.declaration_hash.hex())
            if isinstance(loaded, Failure):
                return loaded
            if ctx.creator != loaded.value[0].controller:
                return failure(
                    governance_error(
                        ErrorCode.NOT_THE_SUBJECT,
                        "only the data subject or the controller may erase a record",
                    )
                )
        subject_pseudo, payload_hash = parts
        if not _erase(ctx, subject_pseudo, payload_hash):
            return failure(
                governance_error(ErrorCode.DUPLICATE_RECORD, f"record already erased: {key}")
            )
        return success({"record_key": key, "erased": [key]})
