"""
Hash-linked chain, commit path and history queries.

The ledger has a single committer. ``validate_and_commit_block`` holds the
ledger lock for the whole block; readers take snapshots between commits.
There is no operation that removes or rewrites a committed block.
"""

from __future__ import annotations

import threading
from dataclasses import replace
from typing import TYPE_CHECKING

from core.errors import ErrorCode, governance_error
from core.logging import get_logger
from core.result import failure, success
from services.ledger.codec import compute_tx_id, endorsement_message, rwset_digest
from services.ledger.hashing import hash_block, merkle_root
from services.ledger.state import Version, WorldState
from services.ledger.types import (
    GENESIS_PREV_HASH,
    Attempt,
    Block,
    BlockHeader,
    ChainVerdict,
    HistoryItem,
    ValidationCode,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

    from core.result import Outcome
    from services.ledger.state import StateSnapshot, VersionedValue
    from services.ledger.types import Transaction
    from services.ledger.validation import TxValidator

logger = get_logger(__name__)

type CommitListener = Callable[[Block], None]


def build_block(
    height: int,
    prev_hash: bytes,
    timestamp: int,
    txs: Iterable[Transaction],
) -> Block:
    """Assemble a block and store its header hash."""
    ordered = tuple(txs)
    header = BlockHeader(
        height=height,
        prev_hash=prev_hash,
        data_hash=merkle_root([tx.tx_id for tx in ordered]),
        timestamp=timestamp,
    )
    return Block(header=header, txs=ordered, block_hash=hash_block(header))


def genesis_block(timestamp: int = 0) -> Block:
    """Block 0: no transactions, all-zero previous hash."""
    return build_block(0, GENESIS_PREV_HASH, timestamp, ())


def _structure_problem(block: Block) -> str | None:
    """Content checks that need no state."""
    for tx in block.txs:
        if compute_tx_id(tx.proposal) != tx.tx_id:
            return f"tx id mismatch for {tx.tx_id}"
    if merkle_root([tx.tx_id for tx in block.txs]) != block.header.data_hash:
        return "data hash mismatch"
    if hash_block(block.header) != block.block_hash:
        return "block hash mismatch"
    return None


def _link_problem(block: Block, previous: Block | None) -> str | None:
    if previous is None:
        if block.height != 0 or block.header.prev_hash != GENESIS_PREV_HASH:
            return "genesis header malformed"
        return None
    if block.height != previous.height + 1:
        return f"height {block.height} does not follow {previous.height}"
    if block.header.prev_hash != previous.block_hash:
        return "previous hash does not match"
    return None


def rebuild_state(blocks: Iterable[Block]) -> WorldState:
    """Replay the writes of Valid transactions in chain order."""
    state = WorldState()
    for block in blocks:
        for index, tx in enumerate(block.txs):
            if tx.validation_code is ValidationCode.VALID:
                state.apply(tx.rwset.writes, Version(block.height, index))
    return state


def verify_chain(blocks: Sequence[Block], validator: TxValidator) -> ChainVerdict:
    """
    Check a chain from genesis.

    Recomputes transaction ids, data hashes, block hashes and links, checks
    that every endorsement is signed over the digest of the stored read-write
    set, and replays validation to compare the stored codes.

    Returns:
        Verdict naming the first inconsistent height, if any.
    """
    state = WorldState()
    previous: Block | None = None
    for block in blocks:
        problem = _link_problem(block, previous) or _structure_problem(block)
        if problem is None:
            problem = _replay_problem(block, state, validator)
        if problem is not None:
            logger.warning("Chain verification failed", height=block.height, reason=problem)
            return ChainVerdict(first_bad_height=block.height, reason=problem)
        previous = block
    return ChainVerdict()


def _replay_problem(block: Block, state: WorldState, validator: TxValidator) -> str | None:
    registry = validator.registry
    for index, tx in enumerate(block.txs):
        digest = rwset_digest(tx.rwset)
        for endorsement in tx.endorsements:
            if endorsement.rwset_digest != digest:
                return f"endorsement digest mismatch in {tx.tx_id}"
            message = endorsement_message(tx.proposal.proposal_id, digest)
            if not registry.verify(endorsement.endorser, message, endorsement.signature).unwrap_or(
                False
            ):
                return f"endorsement signature invalid in {tx.tx_id}"
        if not validator.creator_signature_holds(tx):
            return f"creator signature invalid in {tx.tx_id}"
        code = validator.validate(tx, state, block.timestamp)
        if code is not tx.validation_code:
            return f"validation code mismatch in {tx.tx_id}"
        if code is ValidationCode.VALID:
            state.apply(tx.rwset.writes, Version(block.height, index))
    return None


def get_history(blocks: Iterable[Block], key: str) -> list[HistoryItem]:
    """Every Valid write to ``key`` in chain order."""
    items: list[HistoryItem] = []
    for block in blocks:
        for index, tx in enumerate(block.txs):
            if tx.validation_code is not ValidationCode.VALID:
                continue
            value = tx.rwset.written(key)
            if value is not None:
                items.append(
                    HistoryItem(
                        tx_id=tx.tx_id,
                        creator=tx.proposal.creator,
                        block_timestamp=block.timestamp,
                        value=value,
                        version=(block.height, index),
                    )
                )
    return items


def get_attempts(blocks: Iterable[Block], key: str) -> list[Attempt]:
    """Every committed transaction touching ``key``, valid or not."""
    return [
        Attempt(
            tx_id=tx.tx_id,
            creator=tx.proposal.creator,
            action=tx.proposal.action,
            block_timestamp=block.timestamp,
            validation_code=tx.validation_code,
        )
        for block in blocks
        for tx in block.txs
        if tx.validation_code is not None and tx.rwset.touches(key)
    ]


class Ledger:
    """
    One peer's copy of the chain and its world state.

    Example:
        >>> ledger = Ledger(validator)
        >>> ledger.height
        0
    """

    def __init__(self, validator: TxValidator, genesis_timestamp: int = 0) -> None:
        """Start from a fresh genesis block."""
        self._validator = validator
        self._lock = threading.RLock()
        self._blocks: list[Block] = [genesis_block(genesis_timestamp)]
        self._state = WorldState()
        self._tx_ids: set[str] = set()
        self._listeners: list[CommitListener] = []

    @classmethod
    def restore(cls, blocks: Sequence[Block], validator: TxValidator) -> Outcome[Ledger]:
        """
        Rebuild a ledger from persisted blocks.

        Returns:
            Result with the ledger, or BrokenLink when the blocks do not verify.
        """
        if not blocks:
            return success(cls(validator))
        verdict = verify_chain(blocks, validator)
        if not verdict.ok:
            return failure(
                governance_error(
                    ErrorCode.BROKEN_LINK,
                    f"stored chain fails at height {verdict.first_bad_height}: {verdict.reason}",
                )
            )
        ledger = cls(validator, genesis_timestamp=blocks[0].timestamp)
        ledger._blocks = list(blocks)
        ledger._state = rebuild_state(blocks)
        ledger._tx_ids = {tx.tx_id for block in blocks for tx in block.txs}
        return success(ledger)

    @property
    def validator(self) -> TxValidator:
        """Validator assigning codes."""
        return self._validator

    @property
    def blocks(self) -> tuple[Block, ...]:
        """Committed blocks, genesis first."""
        with self._lock:
            return tuple(self._blocks)

    @property
    def tip(self) -> Block:
        """Last committed block."""
        with self._lock:
            return self._blocks[-1]

    @property
    def height(self) -> int:
        """Height of the tip."""
        return self.tip.height

    @property
    def chain_hash(self) -> bytes:
        """Hash of the tip block."""
        return self.tip.block_hash

    def block(self, height: int) -> Block | None:
        """Block at ``height`` or None."""
        with self._lock:
            if 0 <= height < len(self._blocks):
                return self._blocks[height]
            return None

    def snapshot(self) -> StateSnapshot:
        """Immutable view of the state at the current tip."""
        with self._lock:
            return self._state.snapshot(self._blocks[-1].height)

    def state_digest(self) -> bytes:
        """Digest of the incrementally maintained state."""
        with self._lock:
            return self._state.digest()

    def get_state(self, key: str) -> VersionedValue | None:
        """Committed value of ``key``."""
        with self._lock:
            return self._state.get(key)

    def contains_tx(self, tx_id: str) -> bool:
        """Whether ``tx_id`` is already on the chain."""
        with self._lock:
            return tx_id in self._tx_ids

    def add_commit_listener(self, listener: CommitListener) -> None:
        """Call ``listener`` with every block after it commits."""
        self._listeners.append(listener)

    def validate_and_commit_block(self, block: Block) -> Outcome[tuple[ValidationCode, ...]]:
        """
        Validate every transaction in order and append the block.

        Valid transactions apply their writes at ``(height, tx_index)`` before
        the next transaction is checked, so a later read of the same key in
        the block conflicts. Invalid transactions stay in the block and
        apply nothing.

        Returns:
            Result with the per-transaction codes, or BrokenLink when the block
            does not extend the tip or its content does not match its header.
        """
        with self._lock:
            tip = self._blocks[-1]
            problem = _link_problem(block, tip) or _structure_problem(block)
            if problem is not None:
                logger.warning("Block rejected", height=block.height, reason=problem)
                return failure(governance_error(ErrorCode.BROKEN_LINK, problem))
            committed: list[Transaction] = []
            for index, tx in enumerate(block.txs):
                code = self._validator.validate(tx, self._state, block.timestamp)
                if code is ValidationCode.VALID:
                    self._state.apply(tx.rwset.writes, Version(block.height, index))
                committed.append(replace(tx, validation_code=code))
            stored = replace(block, txs=tuple(committed))
            self._blocks.append(stored)
            self._tx_ids.update(tx.tx_id for tx in committed)
            codes = tuple(tx.validation_code for tx in committed if tx.validation_code)
        logger.info(
            "Block committed",
            height=block.height,
            valid=sum(code is ValidationCode.VALID for code in codes),
            invalid=sum(code is not ValidationCode.VALID for code in codes),
        )
        for listener in self._listeners:
            listener(stored)
        return success(codes)

    def verify(self) -> ChainVerdict:
        """Run :func:`verify_chain` over this ledger."""
        return verify_chain(self.blocks, self._validator)

    def get_history(self, key: str) -> list[HistoryItem]:
        """Valid writes to ``key``."""
        return get_history(self.blocks, key)

    def get_attempts(self, key: str) -> list[Attempt]:
        """All committed transactions touching ``key``."""
        return get_attempts(self.blocks, key)
