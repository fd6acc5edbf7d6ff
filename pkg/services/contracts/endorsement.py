"""Endorsing simulation results and checking endorsement policies."""

from __future__ import annotations

from typing import TYPE_CHECKING

from core.logging import get_logger
from core.result import Failure, success
from services.contracts.types import Endorsement
from services.ledger.codec import endorsement_message, rwset_digest

if TYPE_CHECKING:
    from collections.abc import Iterable

    from core.result import Outcome
    from services.contracts.types import EndorsementPolicy, ReadWriteSet
    from services.identity.registry import ActorRegistry

logger = get_logger(__name__)


def endorse(
    proposal_id: str,
    rwset: ReadWriteSet,
    endorser: str,
    registry: ActorRegistry,
) -> Outcome[Endorsement]:
    """Sign ``proposal_id || rwset_digest`` as ``endorser``."""
    digest = rwset_digest(rwset)
    signature = registry.sign_as(endorser, endorsement_message(proposal_id, digest))
    if isinstance(signature, Failure):
        return signature
    return success(Endorsement(endorser=endorser, rwset_digest=digest, signature=signature.value))


def endorsement_is_sound(
    endorsement: Endorsement,
    proposal_id: str,
    registry: ActorRegistry,
) -> bool:
    """True when the signature verifies over the digest the endorsement carries."""
    message = endorsement_message(proposal_id, endorsement.rwset_digest)
    return registry.verify(endorsement.endorser, message, endorsement.signature).unwrap_or(False)


def check_endorsement_policy(
    policy: EndorsementPolicy,
    endorsements: Iterable[Endorsement],
    proposal_id: str,
    rwset: ReadWriteSet,
    registry: ActorRegistry,
) -> bool:
    """
    Whether ``k`` distinct members of the endorser set vouch for ``rwset``.

    Endorsements from outsiders, with a foreign digest or with a bad
    signature are ignored rather than fatal.
    """
    expected = rwset_digest(rwset)
    endorsers: set[str] = set()
    for endorsement in endorsements:
        if endorsement.endorser not in policy.endorser_set:
            continue
        if endorsement.rwset_digest != expected:
            logger.debug("Endorsement digest mismatch", endorser=endorsement.endorser)
            continue
        if not endorsement_is_sound(endorsement, proposal_id, registry):
            logger.debug("Endorsement signature invalid", endorser=endorsement.endorser)
            continue
        endorsers.add(endorsement.endorser)
    return len(endorsers) >= policy.k
