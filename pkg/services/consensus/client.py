"""Client side of the execute-order-validate flow."""

from __future__ import annotations

from collections import defaultdict
from typing import TYPE_CHECKING

from core.errors import ErrorCode, governance_error
from core.result import Failure, failure, success
from services.ledger.codec import compute_tx_id, proposal_bytes
from services.ledger.types import Transaction

if TYPE_CHECKING:
    from collections.abc import Iterable

    from core.errors import GovernanceError
    from core.result import Outcome, Result
    from services.contracts.types import Endorsement, SimulationResult, TxProposal
    from services.identity.registry import ActorRegistry

type EndorsementReply = Result[tuple[SimulationResult, tuple[Endorsement, ...]], GovernanceError]


def select_endorsements(
    replies: Iterable[EndorsementReply],
) -> Outcome[tuple[SimulationResult, tuple[Endorsement, ...]]]:
    """
    Pick the read-write set most endorsers agree on.

    Endorsements for other read-write sets are dropped. Ties go to the
    group seen first. When every endorser rejected the proposal, the first
    rejection is returned.

    Returns:
        Result with the chosen simulation and its endorsements, or the
        governance error the endorsers reported.
    """
    groups: dict[bytes, list[Endorsement]] = defaultdict(list)
    results: dict[bytes, SimulationResult] = {}
    first_error: GovernanceError | None = None
    for reply in replies:
        if isinstance(reply, Failure):
            first_error = first_error or reply.error
            continue
        result, endorsements = reply.value
        for endorsement in endorsements:
            groups[endorsement.rwset_digest].append(endorsement)
            results.setdefault(endorsement.rwset_digest, result)
    if not groups:
        if first_error is not None:
            return failure(first_error)
        return failure(governance_error(ErrorCode.NO_ENDORSEMENT, "no endorser signed"))
    digest = max(groups, key=lambda d: len(groups[d]))
    return success((results[digest], tuple(groups[digest])))


def assemble_transaction(
    proposal: TxProposal,
    result: SimulationResult,
    endorsements: tuple[Endorsement, ...],
    registry: ActorRegistry,
    signer: str,
) -> Outcome[Transaction]:
    """
    Sign the proposal as ``signer`` and wrap it for ordering.

    Returns:
        Result with the transaction, or UnknownActor, InactiveActor.
    """
    signature = registry.sign_as(signer, proposal_bytes(proposal))
    if isinstance(signature, Failure):
        return signature
    return success(
        Transaction(
            tx_id=compute_tx_id(proposal),
            proposal=proposal,
            rwset=result.rwset,
            endorsements=endorsements,
            creator_signature=signature.value,
        )
    )
