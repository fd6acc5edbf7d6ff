"""Audit contract: read-only actions whose invocation itself is recorded on-chain."""

from __future__ import annotations

from typing import TYPE_CHECKING, ClassVar

from core.errors import ErrorCode, governance_error
from core.result import Failure, failure, success
from services.consent.machine import consent_status_at
from services.contracts.base import BaseContract, Response, expect_args, load_declaration
from services.contracts.consent import load_consent
from services.contracts.types import ContractName

if TYPE_CHECKING:
    from core.result import Outcome
    from services.contracts.base import ContractContext


class AuditContract(BaseContract):
    """``audit.*`` actions."""

    contract_name: ClassVar[ContractName] = ContractName.AUDIT
    handlers: ClassVar[dict[str, str]] = {"history": "history", "explain": "explain"}

    def history(self, ctx: ContractContext) -> Outcome[Response]:
        """Current value and version of a key: ``[key]``."""
        if (error := expect_args(ctx, 1)) is not None:
            return error
        key = ctx.args[0]
        value = ctx.state.get(key)
        version = ctx.state.snapshot.version_of(key)
        return success(
            {
                "key": key,
                "value": value.hex() if value is not None else None,
                "version": version.render() if version is not None else None,
            }
        )

    def explain(self, ctx: ContractContext) -> Outcome[Response]:
        """Declaration and consent status for a subject: ``[subject_handle, declaration_hex]``."""
        if (error := expect_args(ctx, 2)) is not None:
            return error
        handle, declaration_hex = ctx.args
        if ctx.creator != handle:
            return failure(
                governance_error(
                    ErrorCode.NOT_THE_SUBJECT, "only the data subject can request an explanation"
                )
            )
        loaded = load_declaration(ctx, declaration_hex)
        if isinstance(loaded, Failure):
            return loaded
        declaration, digest = loaded.value
        record = load_consent(ctx, handle, digest)
        if isinstance(record, Failure):
            return record
        return success(
            {
                "declaration": declaration.to_dict(),
                "state": consent_status_at(record.value, ctx.now).value,
                "history": [
                    {"state": e.state.value, "timestamp": e.timestamp, "actor": e.actor}
                    for e in record.value.history
                ],
            }
        )
