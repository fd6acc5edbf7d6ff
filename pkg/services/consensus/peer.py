"""A committing peer that may host endorsers."""

from __future__ import annotations

from typing import TYPE_CHECKING

from core.logging import get_logger
from core.result import Failure, success
from services.consensus.types import PeerReport
from services.contracts.endorsement import endorse
from services.contracts.engine import simulate_proposal

if TYPE_CHECKING:
    from core.result import Outcome
    from services.contracts.engine import ContractRegistry
    from services.contracts.types import Endorsement, SimulationResult, TxProposal
    from services.identity.registry import ActorRegistry
    from services.ledger.chain import Ledger
    from services.ledger.types import Block, ValidationCode

logger = get_logger(__name__)


class Peer:
    """Holds a ledger, simulates for hosted endorsers and commits delivered blocks."""

    def __init__(
        self,
        peer_id: str,
        ledger: Ledger,
        registry: ActorRegistry,
        endorsers: tuple[str, ...] = (),
        contracts: ContractRegistry | None = None,
    ) -> None:
        """Create a peer around ``ledger``."""
        self.peer_id = peer_id
        self.ledger = ledger
        self.endorsers = endorsers
        self._registry = registry
        self._contracts = contracts

    def simulate(self, proposal: TxProposal) -> Outcome[SimulationResult]:
        """Simulate against the current snapshot."""
        return simulate_proposal(proposal, self.ledger.snapshot(), self._registry, self._contracts)

    def endorse(
        self,
        proposal: TxProposal,
    ) -> Outcome[tuple[SimulationResult, tuple[Endorsement, ...]]]:
        """
        Simulate once and sign the result as every hosted endorser.

        Returns:
            Result with the simulation and its endorsements, or the
            simulation's governance error.
        """
        result = self.simulate(proposal)
        if isinstance(result, Failure):
            return result
        endorsements: list[Endorsement] = []
        for endorser in self.endorsers:
            signed = endorse(proposal.proposal_id, result.value.rwset, endorser, self._registry)
            if isinstance(signed, Failure):
                logger.warning(
                    "Endorser cannot sign",
                    peer=self.peer_id,
                    endorser=endorser,
                    error=signed.error.name,
                )
                continue
            endorsements.append(signed.value)
        return success((result.value, tuple(endorsements)))

    def deliver(self, block: Block) -> Outcome[tuple[ValidationCode, ...]]:
        """Validate and commit a delivered block."""
        return self.ledger.validate_and_commit_block(block)

    def report(self) -> PeerReport:
        """Current chain and state view."""
        return PeerReport(
            peer_id=self.peer_id,
            height=self.ledger.height,
            chain_hash=self.ledger.chain_hash,
            state_digest=self.ledger.state_digest(),
        )
