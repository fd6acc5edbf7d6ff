"""
Single logical ordering service.

Transactions are queued FIFO and cut into blocks by size or by timeout. The
orderer keeps its own view of the tip so the blocks it emits link to each
other regardless of when peers receive them.
"""

from __future__ import annotations

from collections import deque
from typing import TYPE_CHECKING

from core.errors import ErrorCode, governance_error
from core.logging import get_logger
from core.result import failure, success
from services.contracts.endorsement import endorsement_is_sound
from services.ledger.chain import build_block
from services.ledger.codec import proposal_bytes

if TYPE_CHECKING:
    from core.result import Outcome
    from services.consensus.types import OrdererConfig
    from services.identity.registry import ActorRegistry
    from services.ledger.types import Block, Transaction

logger = get_logger(__name__)


class Orderer:
    """
    FIFO orderer with size and timeout cutting.

    Admission is a cheap filter: at least one endorsement, signatures that
    verify, and no repeated tx id. The endorsement policy itself is checked
    by committing peers.
    """

    def __init__(
        self,
        config: OrdererConfig,
        registry: ActorRegistry,
        tip_height: int,
        tip_hash: bytes,
    ) -> None:
        """Start empty on top of the given tip."""
        self._config = config
        self._registry = registry
        self._tip_height = tip_height
        self._tip_hash = tip_hash
        self._queue: deque[tuple[int, Transaction]] = deque()
        self._seen: set[str] = set()
        self._emitted: list[Block] = []

    @property
    def queue_length(self) -> int:
        """Transactions waiting to be cut."""
        return len(self._queue)

    @property
    def emitted(self) -> tuple[Block, ...]:
        """Blocks cut so far."""
        return tuple(self._emitted)

    def mark_seen(self, tx_ids: set[str]) -> None:
        """Treat ``tx_ids`` as already ordered."""
        self._seen.update(tx_ids)

    def submit_endorsed_tx(self, tx: Transaction, now: int) -> Outcome[int]:
        """
        Enqueue an endorsed transaction.

        Returns:
            Result with the new queue length, or NoEndorsement, BadSignature,
            DuplicateTx.
        """
        if not tx.endorsements:
            return failure(
                governance_error(ErrorCode.NO_ENDORSEMENT, f"{tx.tx_id} carries no endorsement")
            )
        if tx.tx_id in self._seen:
            return failure(governance_error(ErrorCode.DUPLICATE_TX, f"already ordered: {tx.tx_id}"))
        if not self._registry.verify_handle(
            tx.proposal.creator, proposal_bytes(tx.proposal), tx.creator_signature
        ):
            return failure(
                governance_error(ErrorCode.BAD_SIGNATURE, f"creator signature of {tx.tx_id}")
            )
        for endorsement in tx.endorsements:
            if not endorsement_is_sound(endorsement, tx.proposal.proposal_id, self._registry):
                return failure(
                    governance_error(
                        ErrorCode.BAD_SIGNATURE,
                        f"endorsement by {endorsement.endorser} on {tx.tx_id}",
                    )
                )
        self._seen.add(tx.tx_id)
        self._queue.append((now, tx))
        return success(len(self._queue))

    def cut_block(self, now: int) -> Block | None:
        """
        Cut a block when the queue reaches ``batch_size`` or the oldest
        queued transaction has waited ``batch_timeout_ticks``.

        Never emits an empty block.
        """
        if not self._queue:
            return None
        full = len(self._queue) >= self._config.batch_size
        first_enqueued = self._queue[0][0]
        if not full and now - first_enqueued < self._config.batch_timeout_ticks:
            return None
        return self._cut(now)

    def force_cut(self, now: int) -> Block | None:
        """Cut whatever is queued, up to ``batch_size``."""
        if not self._queue:
            return None
        return self._cut(now)

    def _cut(self, now: int) -> Block:
        count = min(len(self._queue), self._config.batch_size)
        txs = [self._queue.popleft()[1] for _ in range(count)]
        block = build_block(self._tip_height + 1, self._tip_hash, now, txs)
        self._tip_height = block.height
        self._tip_hash = block.block_hash
        self._emitted.append(block)
        logger.info("Block cut", height=block.height, txs=len(txs), timestamp=now)
        return block
