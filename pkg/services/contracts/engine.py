"""Contract registry and proposal simulation."""

from __future__ import annotations

from typing import TYPE_CHECKING

from core.errors import ErrorCode, governance_error, unknown_actor
from core.logging import bind_context, get_logger, unbind_context
from core.result import Failure, failure, success
from services.contracts.audit import AuditContract
from services.contracts.base import ContractContext
from services.contracts.consent import ConsentContract
from services.contracts.data import DataContract
from services.contracts.rwset import RWSetBuilder
from services.contracts.types import ContractName, SimulationResult, TxProposal

if TYPE_CHECKING:
    from core.result import Outcome
    from services.contracts.base import Contract
    from services.identity.registry import ActorRegistry
    from services.ledger.state import StateSnapshot

logger = get_logger(__name__)


class ContractRegistry:
    """
    Registry of contracts by name.

    Example:
        >>> contracts = ContractRegistry()
        >>> contracts.register(ConsentContract())
        >>> contracts.get(ContractName.CONSENT).is_success()
        True
    """

    def __init__(self) -> None:
        """Start with no contracts."""
        self._contracts: dict[ContractName, Contract] = {}

    def register(self, contract: Contract) -> None:
        """Register ``contract`` under its own name."""
        self._contracts[contract.name] = contract

    def get(self, name: ContractName) -> Outcome[Contract]:
        """Return the contract, or UnknownContract."""
        contract = self._contracts.get(name)
        if contract is None:
            return failure(
                governance_error(ErrorCode.UNKNOWN_CONTRACT, f"no contract named {name}")
            )
        return success(contract)

    @property
    def names(self) -> list[ContractName]:
        """Registered names."""
        return list(self._contracts)

    @property
    def actions(self) -> list[str]:
        """Every dotted action of every registered contract."""
        return [action for contract in self._contracts.values() for action in contract.actions]


def default_contracts() -> ContractRegistry:
    """Registry holding the built-in contracts."""
    contracts = ContractRegistry()
    contracts.register(ConsentContract())
    contracts.register(DataContract())
    contracts.register(AuditContract())
    return contracts


def parse_action(action: str) -> Outcome[ContractName]:
    """
    Contract named by a dotted action.

    Returns:
        Result with the contract name, or UnknownContract, UnknownAction.
    """
    prefix, dot, verb = action.partition(".")
    if not dot or not verb:
        return failure(governance_error(ErrorCode.UNKNOWN_ACTION, f"not a dotted action: {action}"))
    try:
        return success(ContractName(prefix))
    except ValueError:
        return failure(governance_error(ErrorCode.UNKNOWN_CONTRACT, f"no contract named {prefix}"))


_DEFAULT_CONTRACTS = default_contracts()


def simulate_proposal(
    proposal: TxProposal,
    snapshot: StateSnapshot,
    registry: ActorRegistry,
    contracts: ContractRegistry | None = None,
) -> Outcome[SimulationResult]:
    """
    Execute a proposal against a snapshot without touching it.

    Args:
        proposal: Proposal to run.
        snapshot: Committed state to read from.
        registry: Actor registry.
        contracts: Contracts to dispatch to; the built-ins by default.

    Returns:
        Result with the read-write set and the action's response, or the
        governance error the action raised.
    """
    bind_context(proposal_id=proposal.proposal_id)
    try:
        contract = (contracts or _DEFAULT_CONTRACTS).get(proposal.contract)
        if isinstance(contract, Failure):
            return contract
        if registry.resolve(proposal.creator) is None:
            return failure(unknown_actor(proposal.creator))
        builder = RWSetBuilder(snapshot)
        ctx = ContractContext(proposal=proposal, state=builder, registry=registry)
        outcome = contract.value.invoke(proposal.action, ctx)
        if isinstance(outcome, Failure):
            logger.info(
                "Proposal rejected",
                action=proposal.action,
                error=outcome.error.name,
            )
            return outcome
        rwset = builder.build()
        logger.debug(
            "Proposal simulated",
            action=proposal.action,
            reads=len(rwset.reads),
            writes=len(rwset.writes),
        )
        return success(SimulationResult(rwset=rwset, response=outcome.value))
    finally:
        unbind_context("proposal_id")


def build_proposal(
    proposal_id: str,
    creator: str,
    action: str,
    args: tuple[str, ...],
    now: int,
) -> Outcome[TxProposal]:
    """
    Assemble a proposal from a dotted action.

    Returns:
        Result with the proposal, or UnknownContract, UnknownAction.
    """
    contract = parse_action(action)
    if isinstance(contract, Failure):
        return contract
    return success(
        TxProposal(
            proposal_id=proposal_id,
            creator=creator,
            contract=contract.value,
            action=action,
            args=args,
            client_timestamp=now,
        )
    )
