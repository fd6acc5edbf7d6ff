"""Per-transaction validation at commit time."""

from __future__ import annotations

from typing import TYPE_CHECKING

from services.contracts.endorsement import check_endorsement_policy
from services.ledger.codec import proposal_bytes
from services.ledger.types import ValidationCode

if TYPE_CHECKING:
    from services.contracts.types import EndorsementPolicy
    from services.identity.registry import ActorRegistry
    from services.ledger.state import WorldState
    from services.ledger.types import Transaction


class TxValidator:
    """
    Assigns validation codes.

    A transaction is Valid iff its policy holds and every read version still
    matches the state. Policy covers the creator signature, the client
    timestamp not running ahead of the block, and the endorsement policy.
    """

    def __init__(self, policy: EndorsementPolicy, registry: ActorRegistry) -> None:
        """Validate against ``policy`` with keys from ``registry``."""
        self._policy = policy
        self._registry = registry

    @property
    def policy(self) -> EndorsementPolicy:
        """Endorsement policy in force."""
        return self._policy

    @property
    def registry(self) -> ActorRegistry:
        """Registry used to verify signatures."""
        return self._registry

    def creator_signature_holds(self, tx: Transaction) -> bool:
        """Whether the creator signed the canonical proposal."""
        return self._registry.verify_handle(
            tx.proposal.creator, proposal_bytes(tx.proposal), tx.creator_signature
        )

    def policy_holds(self, tx: Transaction, block_timestamp: int) -> bool:
        """Creator signature, clock and endorsement checks."""
        if tx.proposal.client_timestamp > block_timestamp:
            return False
        if not self.creator_signature_holds(tx):
            return False
        return check_endorsement_policy(
            self._policy,
            tx.endorsements,
            tx.proposal.proposal_id,
            tx.rwset,
            self._registry,
        )

    @staticmethod
    def reads_current(tx: Transaction, state: WorldState) -> bool:
        """MVCC check: every read version equals the current one."""
        return all(state.version_of(key) == version for key, version in tx.rwset.reads)

    def validate(self, tx: Transaction, state: WorldState, block_timestamp: int) -> ValidationCode:
        """Code for ``tx`` against ``state`` as it stands before the tx applies."""
        if not self.policy_holds(tx, block_timestamp):
            return ValidationCode.POLICY_FAILURE
        if not self.reads_current(tx, state):
            return ValidationCode.MVCC_CONFLICT
        return ValidationCode.VALID
