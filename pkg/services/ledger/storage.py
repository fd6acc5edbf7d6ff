"""
Append-only chain file.

Each record is an 8-byte big-endian length followed by the canonical JSON of
one block. The file is only ever opened for appending or reading.
"""

from __future__ import annotations

import json
import threading
from typing import TYPE_CHECKING

from core.errors import ErrorCode, governance_error
from core.logging import get_logger
from core.result import failure, success
from services.ledger.codec import canonical_json
from services.ledger.types import Block

if TYPE_CHECKING:
    from pathlib import Path

    from core.errors import GovernanceError
    from core.result import Outcome

logger = get_logger(__name__)

LENGTH_PREFIX = 8


def encode_block_record(block: Block) -> bytes:
    """Canonical JSON bytes of a block."""
    return canonical_json(block.to_dict())


class ChainLog:
    """Length-prefixed block records in a single file."""

    def __init__(self, path: Path) -> None:
        """Use ``path``; the file is created on first append."""
        self._path = path
        self._lock = threading.Lock()

    @property
    def path(self) -> Path:
        """Location of the log."""
        return self._path

    def append(self, block: Block) -> None:
        """Append one block record."""
        record = encode_block_record(block)
        with self._lock:
            self._path.parent.mkdir(parents=True, exist_ok=True)
            with self._path.open("ab") as handle:
                handle.write(len(record).to_bytes(LENGTH_PREFIX, "big"))
                handle.write(record)
        logger.debug("Block persisted", height=block.height, path=str(self._path))

    def read_all(self) -> Outcome[list[Block]]:
        """
        Load every block.

        Returns:
            Result with blocks in file order (empty when the file does not
            exist), or MalformedRecord for a truncated or unparsable record.
        """
        if not self._path.exists():
            return success([])
        data = self._path.read_bytes()
        blocks: list[Block] = []
        offset = 0
        while offset < len(data):
            if offset + LENGTH_PREFIX > len(data):
                return failure(self._malformed(offset, "truncated length prefix"))
            size = int.from_bytes(data[offset : offset + LENGTH_PREFIX], "big")
            start = offset + LENGTH_PREFIX
            if start + size > len(data):
                return failure(self._malformed(offset, "truncated record"))
            try:
                blocks.append(Block.from_dict(json.loads(data[start : start + size])))
            except (ValueError, KeyError, TypeError) as exc:
                return failure(self._malformed(offset, str(exc)))
            offset = start + size
        return success(blocks)

    def _malformed(self, offset: int, reason: str) -> GovernanceError:
        return governance_error(
            ErrorCode.MALFORMED_RECORD, f"{self._path} at byte {offset}: {reason}"
        )
