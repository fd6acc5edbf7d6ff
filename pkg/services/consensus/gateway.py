"""
Single-process gateway used by the operator CLI.

Runs one proposal through simulate, endorse, order, cut and commit against a
local ledger, persisting each committed block to the chain log.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from core.errors import ErrorCode, governance_error
from core.logging import get_logger
from core.result import Failure, failure, success
from services.consensus.client import assemble_transaction, select_endorsements
from services.consensus.orderer import Orderer
from services.contracts.endorsement import endorse
from services.contracts.engine import build_proposal, simulate_proposal

if TYPE_CHECKING:
    from core.result import Outcome
    from services.consensus.client import EndorsementReply
    from services.consensus.types import NetworkConfig
    from services.contracts.engine import ContractRegistry
    from services.contracts.types import TxProposal
    from services.identity.registry import ActorRegistry
    from services.ledger.chain import Ledger
    from services.ledger.storage import ChainLog
    from services.ledger.types import ValidationCode

logger = get_logger(__name__)


@dataclass(frozen=True, slots=True)
class TxReceipt:
    """What the submitter learns once its transaction committed."""

    tx_id: str
    height: int
    validation_code: ValidationCode
    response: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready representation."""
        return {
            "tx_id": self.tx_id,
            "height": self.height,
            "validation_code": self.validation_code.value,
            "response": self.response,
        }


class Gateway:
    """Drives proposals through a local ledger one block at a time."""

    def __init__(
        self,
        config: NetworkConfig,
        registry: ActorRegistry,
        ledger: Ledger,
        chain_log: ChainLog | None = None,
        contracts: ContractRegistry | None = None,
    ) -> None:
        """Order on top of the ledger's current tip."""
        self._config = config
        self._registry = registry
        self._ledger = ledger
        self._chain_log = chain_log
        self._contracts = contracts
        self._orderer = Orderer(config.orderer, registry, ledger.height, ledger.chain_hash)
        self._orderer.mark_seen({tx.tx_id for block in ledger.blocks for tx in block.txs})
        self._sequence = itertools.count(1)

    @property
    def ledger(self) -> Ledger:
        """Ledger being extended."""
        return self._ledger

    def next_proposal_id(self) -> str:
        """Proposal id unique on this chain: next height plus a local counter."""
        return f"g{self._ledger.height + 1}-{next(self._sequence)}"

    def invoke(
        self,
        actor_id: str,
        action: str,
        args: tuple[str, ...],
        now: int,
    ) -> Outcome[TxReceipt]:
        """Build a proposal as ``actor_id`` and run it to commit."""
        proposal = build_proposal(
            self.next_proposal_id(), self._registry.onchain_handle(actor_id), action, args, now
        )
        if isinstance(proposal, Failure):
            return proposal
        return self.submit(actor_id, proposal.value, now)

    def submit(self, actor_id: str, proposal: TxProposal, now: int) -> Outcome[TxReceipt]:
        """
        Endorse, order and commit ``proposal`` signed by ``actor_id``.

        Governance rejections from simulation come back as failures and leave
        the chain untouched. A transaction that reaches a block always yields
        a receipt, whatever its validation code.
        """
        simulated = simulate_proposal(
            proposal, self._ledger.snapshot(), self._registry, self._contracts
        )
        if isinstance(simulated, Failure):
            return simulated
        replies: list[EndorsementReply] = []
        # every local endorser sees the same snapshot, so one simulation serves all
        for endorser in sorted(self._config.policy.endorser_set):
            signed = endorse(proposal.proposal_id, simulated.value.rwset, endorser, self._registry)
            if isinstance(signed, Failure):
                logger.warning("Endorser cannot sign", endorser=endorser, error=signed.error.name)
                continue
            replies.append(success((simulated.value, (signed.value,))))
        chosen = select_endorsements(replies)
        if isinstance(chosen, Failure):
            return chosen
        result, endorsements = chosen.value
        tx = assemble_transaction(proposal, result, endorsements, self._registry, actor_id)
        if isinstance(tx, Failure):
            return tx
        admitted = self._orderer.submit_endorsed_tx(tx.value, now)
        if isinstance(admitted, Failure):
            return admitted
        block = self._orderer.force_cut(now)
        if block is None:
            return failure(governance_error(ErrorCode.NO_ENDORSEMENT, "nothing was ordered"))
        codes = self._ledger.validate_and_commit_block(block)
        if isinstance(codes, Failure):
            return codes
        if self._chain_log is not None:
            self._chain_log.append(self._ledger.tip)
        return success(
            TxReceipt(
                tx_id=tx.value.tx_id,
                height=block.height,
                validation_code=codes.value[0],
                response=result.response,
            )
        )
