"""
Consent contract.

Publishes declarations and drives the consent state machine on-chain. Consent
records are keyed by the subject's pseudonymous handle and the declaration
hash, so a record only ever authorizes the exact purpose it was given for.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, ClassVar

from core.errors import ErrorCode, bad_args, governance_error, unknown_actor
from core.result import Failure, failure, success
from services.consent.codec import consent_key, decode_record, encode_record
from services.consent.machine import request_consent, respond_consent, revoke_consent
from services.consent.types import ConsentRecord, Decision
from services.contracts.base import (
    BaseContract,
    Response,
    declaration_key,
    effective_roles,
    expect_args,
    load_declaration,
    resolve_creator,
    resolve_subject,
    role_key,
)
from services.contracts.types import ContractName
from services.identity.types import Role
from services.legalprose.declaration import canonical_bytes, hash_declaration, parse_declaration
from services.legalprose.lines import split_list

if TYPE_CHECKING:
    from core.errors import GovernanceError
    from core.result import Outcome
    from services.contracts.base import ContractContext

ASSIGNABLE_ROLES: frozenset[Role] = frozenset({Role.DATA_PROCESSOR})


def _not_a_controller(actor_id: str, reason: str) -> Failure[GovernanceError]:
    return failure(governance_error(ErrorCode.NOT_A_CONTROLLER, f"{actor_id} {reason}"))


def load_consent(
    ctx: ContractContext,
    subject_handle: str,
    declaration_hash: bytes,
) -> Outcome[ConsentRecord]:
    """Current record, or a fresh NotRequested one."""
    raw = ctx.state.get(consent_key(subject_handle, declaration_hash))
    if raw is None:
        return success(ConsentRecord.initial(subject_handle, declaration_hash))
    return decode_record(raw)


def _store(ctx: ContractContext, record: ConsentRecord) -> Response:
    ctx.state.put(consent_key(record.subject, record.declaration_hash), encode_record(record))
    return record.to_dict()


class ConsentContract(BaseContract):
    """``consent.*`` actions."""

    contract_name: ClassVar[ContractName] = ContractName.CONSENT
    handlers: ClassVar[dict[str, str]] = {
        "declare": "declare",
        "request": "request",
        "respond": "respond",
        "revoke": "revoke",
        "assign_role": "assign_role",
    }

    def declare(self, ctx: ContractContext) -> Outcome[Response]:
        """Publish a purpose declaration: ``[declaration_text]``."""
        if (error := expect_args(ctx, 1)) is not None:
            return error
        creator = resolve_creator(ctx)
        if isinstance(creator, Failure):
            return creator
        actor = creator.value
        if Role.DATA_CONTROLLER not in effective_roles(ctx, actor):
            return _not_a_controller(actor.actor_id, "is not a controller")
        parsed = parse_declaration(ctx.args[0])
        if isinstance(parsed, Failure):
            return parsed
        declaration = parsed.value
        if declaration.controller != actor.actor_id:
            return _not_a_controller(actor.actor_id, "is not the declared controller")
        for processor in declaration.processors:
            if ctx.registry.get(processor) is None:
                return failure(unknown_actor(processor))
        digest = hash_declaration(declaration)
        key = declaration_key(digest.hex())
        if ctx.state.exists(key):
            return failure(
                governance_error(
                    ErrorCode.DUPLICATE_DECLARATION,
                    f"declaration already published: {digest.hex()}",
                )
            )
        ctx.state.put(key, canonical_bytes(declaration))
        return success({"declaration_hash": digest.hex(), "declaration": declaration.to_dict()})

    def request(self, ctx: ContractContext) -> Outcome[Response]:
        """Controller asks for consent: ``[subject_handle, declaration_hex]``."""
        if (error := expect_args(ctx, 2)) is not None:
            return error
        handle, declaration_hex = ctx.args
        creator = resolve_creator(ctx)
        if isinstance(creator, Failure):
            return creator
        subject = resolve_subject(ctx, handle)
        if isinstance(subject, Failure):
            return subject
        loaded = load_declaration(ctx, declaration_hex)
        if isinstance(loaded, Failure):
            return loaded
        declaration, digest = loaded.value
        roles = effective_roles(ctx, creator.value)
        if Role.DATA_CONTROLLER in roles and creator.value.actor_id != declaration.controller:
            return _not_a_controller(creator.value.actor_id, "does not control this declaration")
        record = load_consent(ctx, handle, digest)
        if isinstance(record, Failure):
            return record
        updated = request_consent(record.value, ctx.creator, ctx.now, roles)
        if isinstance(updated, Failure):
            return updated
        return success(_store(ctx, updated.value))

    def respond(self, ctx: ContractContext) -> Outcome[Response]:
        """Subject answers: ``[subject_handle, declaration_hex, grant|deny]``."""
        if (error := expect_args(ctx, 3)) is not None:
            return error
        handle, declaration_hex, answer = ctx.args
        try:
            decision = Decision(answer)
        except ValueError:
            return failure(bad_args(f"decision must be grant or deny, got {answer!r}"))
        loaded = load_declaration(ctx, declaration_hex)
        if isinstance(loaded, Failure):
            return loaded
        record = load_consent(ctx, handle, loaded.value[1])
        if isinstance(record, Failure):
            return record
        updated = respond_consent(record.value, ctx.creator, decision, ctx.now)
        if isinstance(updated, Failure):
            return updated
        return success(_store(ctx, updated.value))

    def revoke(self, ctx: ContractContext) -> Outcome[Response]:
        """Subject withdraws a grant: ``[subject_handle, declaration_hex]``."""
        if (error := expect_args(ctx, 2)) is not None:
            return error
        handle, declaration_hex = ctx.args
        loaded = load_declaration(ctx, declaration_hex)
        if isinstance(loaded, Failure):
            return loaded
        record = load_consent(ctx, handle, loaded.value[1])
        if isinstance(record, Failure):
            return record
        updated = revoke_consent(record.value, ctx.creator, ctx.now)
        if isinstance(updated, Failure):
            return updated
        return success(_store(ctx, updated.value))

    def assign_role(self, ctx: ContractContext) -> Outcome[Response]:
        """Controller grants a role inside its organization: ``[actor_id, role]``."""
        if (error := expect_args(ctx, 2)) is not None:
            return error
        target_id, role_name = ctx.args
        creator = resolve_creator(ctx)
        if isinstance(creator, Failure):
            return creator
        actor = creator.value
        if Role.DATA_CONTROLLER not in effective_roles(ctx, actor):
            return _not_a_controller(actor.actor_id, "is not a controller")
        try:
            role = Role(role_name)
        except ValueError:
            return failure(bad_args(f"unknown role: {role_name}"))
        if role not in ASSIGNABLE_ROLES:
            return failure(bad_args(f"role cannot be assigned on-chain: {role_name}"))
        target = ctx.registry.get(target_id)
        if target is None:
            return failure(unknown_actor(target_id))
        if target.is_subject or target.is_organization or target.org_id != actor.org_id:
            return failure(
                governance_error(
                    ErrorCode.ROLE_ORG_MISMATCH,
                    f"{target_id} is not a member of organization {actor.org_id}",
                )
            )
        key = role_key(target_id)
        raw = ctx.state.get(key)
        assigned = set(split_list(raw.decode("utf-8"))) if raw is not None else set()
        assigned.add(role.value)
        ctx.state.put(key, ",".join(sorted(assigned)).encode("utf-8"))
        return success({"actor_id": target_id, "assigned_roles": sorted(assigned)})
