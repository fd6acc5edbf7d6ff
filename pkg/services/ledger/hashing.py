"""Block header hashing and Merkle roots."""

from __future__ import annotations

import hashlib
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from collections.abc import Sequence

    from services.ledger.types import BlockHeader


def _sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def merkle_root(tx_ids: Sequence[str]) -> bytes:
    """
    Merkle root over hex transaction ids.

    Leaves are SHA-256 of the raw id bytes, inner nodes SHA-256 of
    ``left || right``; an odd level duplicates its last node. No ids hash to
    SHA-256 of the empty string.
    """
    if not tx_ids:
        return _sha256(b"")
    level = [_sha256(bytes.fromhex(tx_id)) for tx_id in tx_ids]
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        level = [_sha256(level[i] + level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def header_bytes(header: BlockHeader) -> bytes:
    """Canonical header bytes."""
    return (
        f"height:{header.height}\n"
        f"prev:{header.prev_hash.hex()}\n"
        f"data:{header.data_hash.hex()}\n"
        f"time:{header.timestamp}\n"
    ).encode("ascii")


def hash_block(header: BlockHeader) -> bytes:
    """SHA-256 over the canonical header bytes."""
    return _sha256(header_bytes(header))
