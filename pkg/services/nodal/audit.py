"""Audit export: one JSON object per committed transaction."""

from __future__ import annotations

import hashlib
from typing import TYPE_CHECKING

from core.errors import ErrorCode, governance_error
from core.logging import get_logger
from core.result import failure, success
from services.ledger.codec import canonical_json
from services.nodal.types import AuditExport

if TYPE_CHECKING:
    from pathlib import Path

    from core.result import Outcome
    from services.ledger.chain import Ledger
    from services.ledger.types import Block, Transaction

logger = get_logger(__name__)


def audit_line(block: Block, tx: Transaction) -> str:
    """Canonical JSON for one transaction."""
    code = tx.validation_code.value if tx.validation_code is not None else None
    return canonical_json(
        {
            "height": block.height,
            "tx_id": tx.tx_id,
            "creator": tx.proposal.creator,
            "contract": tx.proposal.contract.value,
            "action": tx.proposal.action,
            "timestamp": block.timestamp,
            "validation_code": code,
        }
    ).decode("utf-8")


def export_audit(ledger: Ledger, start: int, end: int | None = None) -> Outcome[AuditExport]:
    """
    Export the transactions of blocks ``start`` up to but excluding ``end``.

    ``end`` defaults to one past the tip. Valid and invalid transactions are
    both listed.

    Returns:
        Result with the lines and the hex SHA-256 of the file, or BadRange.
    """
    blocks = ledger.blocks
    stop = len(blocks) if end is None else end
    if start < 0 or stop < start or stop > len(blocks):
        return failure(
            governance_error(
                ErrorCode.BAD_RANGE,
                f"range [{start}, {stop}) outside heights 0..{len(blocks) - 1}",
            )
        )
    lines = tuple(audit_line(block, tx) for block in blocks[start:stop] for tx in block.txs)
    export = AuditExport(lines=lines, digest="")
    digest = hashlib.sha256(export.content.encode("utf-8")).hexdigest()
    logger.info("Audit exported", start=start, end=stop, lines=len(lines), digest=digest[:16])
    return success(AuditExport(lines=lines, digest=digest))


def write_audit(export: AuditExport, path: Path) -> None:
    """Write the export to ``path``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(export.content.encode("utf-8"))
