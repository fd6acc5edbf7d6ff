"""
DataPipeline: governed ingestion and consumption of health records.

Submissions are checked before a proposal is built (role, consent,
minimization, in that order) and the same checks run again inside the data
contract at endorsement time. A submitted payload is held per proposal and
reaches the off-chain store only when its ref commits as Valid; only hash
refs reach the ledger, and erasing a payload never touches the chain.
"""

from __future__ import annotations

from collections import Counter
from typing import TYPE_CHECKING

from core.errors import (
    ErrorCode,
    consent_required,
    governance_error,
    minimization_violation,
    unknown_actor,
    unknown_key,
)
from core.logging import get_logger
from core.result import Failure, failure, success
from services.consent.codec import consent_key, decode_record
from services.consent.machine import consent_status_at, is_access_permitted
from services.consent.types import ConsentRecord, ConsentState
from services.contracts.base import declaration_key, merge_roles, role_key
from services.contracts.data import NO_SUPERSEDE, SUBMITTER_ROLES
from services.contracts.engine import build_proposal
from services.identity.signing import PSEUDONYM_PREFIX, pseudonymize
from services.legalprose.declaration import (
    check_field_subset,
    hash_declaration,
    parse_declaration,
)
from services.ledger.types import ValidationCode
from services.pipeline.records import decode_ref
from services.pipeline.types import OwnRecord, PipelineConfig, erasure_key, parse_record_key

if TYPE_CHECKING:
    from core.result import Outcome
    from services.contracts.types import TxProposal
    from services.identity.registry import ActorRegistry
    from services.ledger.chain import Ledger
    from services.ledger.state import StateSnapshot
    from services.ledger.types import Attempt, Block
    from services.legalprose.types import PurposeDeclaration
    from services.pipeline.store import PayloadStore
    from services.pipeline.types import HealthRecordPayload, HealthRecordRef

logger = get_logger(__name__)

ERASURE_PREFIX = "erasure/"
RECORD_PREFIX = "record/"


def _consent_of(snapshot: StateSnapshot, handle: str, declaration_hash: bytes) -> ConsentRecord:
    entry = snapshot.get(consent_key(handle, declaration_hash))
    if entry is None:
        return ConsentRecord.initial(handle, declaration_hash)
    decoded = decode_record(entry.value)
    if isinstance(decoded, Failure):
        logger.warning("Unreadable consent record", handle=handle, error=str(decoded.error))
        return ConsentRecord.initial(handle, declaration_hash)
    return decoded.value


class DataPipeline:
    """
    Ingestion and queries over one peer's ledger.

    Example:
        >>> pipeline = DataPipeline(registry, ledger, MemoryPayloadStore())
        >>> outcome = pipeline.submit_health_record(
        ...     "clinic-a", "citizen-ana", declaration, payload, now=100, proposal_id="p1"
        ... )
    """

    def __init__(
        self,
        registry: ActorRegistry,
        ledger: Ledger,
        store: PayloadStore,
        config: PipelineConfig | None = None,
    ) -> None:
        """Bind to a ledger and subscribe to its commits for payload erasure."""
        self._registry = registry
        self._ledger = ledger
        self._store = store
        self._config = config or PipelineConfig()
        self._staged: dict[str, HealthRecordPayload] = {}
        ledger.add_commit_listener(self.on_block_committed)

    @property
    def store(self) -> PayloadStore:
        """Off-chain payload store."""
        return self._store

    @property
    def pending(self) -> int:
        """Payloads waiting for their proposal to commit."""
        return len(self._staged)

    @property
    def config(self) -> PipelineConfig:
        """Processing limits."""
        return self._config

    def submit_health_record(
        self,
        submitter: str,
        subject: str,
        declaration: PurposeDeclaration,
        payload: HealthRecordPayload,
        now: int,
        *,
        proposal_id: str,
        supersedes: bytes | None = None,
    ) -> Outcome[TxProposal]:
        """
        Check a submission, stage its payload and build the ``data.submit`` proposal.

        Args:
            submitter: Actor id of the controller or processor.
            subject: Actor id of the data subject.
            declaration: Declaration the data is collected under.
            payload: Field values.
            now: Submission time.
            proposal_id: Id for the proposal.
            supersedes: Payload hash of the record being rectified.

        Returns:
            Result with the proposal, or UnknownActor, RoleDenied,
            ConsentRequired, MinimizationViolation.
        """
        snapshot = self._ledger.snapshot()
        actor = self._registry.get(submitter)
        if actor is None:
            return failure(unknown_actor(submitter))
        roles = merge_roles(actor, self._value(snapshot, role_key(actor.actor_id)))
        if not SUBMITTER_ROLES & roles:
            return failure(
                governance_error(ErrorCode.ROLE_DENIED, f"{submitter} may not submit records")
            )
        subject_actor = self._registry.get(subject)
        if subject_actor is None or not subject_actor.is_subject:
            return failure(unknown_actor(subject))
        handle = self._registry.onchain_handle(subject)
        declaration_hash = hash_declaration(declaration)
        consent = _consent_of(snapshot, handle, declaration_hash)
        if not is_access_permitted(consent, declaration_hash, now):
            return failure(consent_required(handle, declaration_hash.hex()))
        extra = check_field_subset(declaration, payload.field_names)
        if extra:
            return failure(minimization_violation(extra))

        payload_hash = payload.payload_hash()
        self._staged[proposal_id] = payload
        logger.info("Payload staged", payload_hash=payload_hash.hex()[:16], submitter=submitter)
        return build_proposal(
            proposal_id,
            self._registry.onchain_handle(submitter),
            "data.submit",
            (
                handle,
                declaration_hash.hex(),
                payload_hash.hex(),
                ",".join(payload.field_names),
                supersedes.hex() if supersedes is not None else NO_SUPERSEDE,
            ),
            now,
        )

    def rectify_record(
        self,
        submitter: str,
        subject: str,
        declaration: PurposeDeclaration,
        old_payload_hash: bytes,
        payload: HealthRecordPayload,
        now: int,
        *,
        proposal_id: str,
    ) -> Outcome[TxProposal]:
        """Supersede a record; the old payload is erased when the new ref commits."""
        return self.submit_health_record(
            submitter,
            subject,
            declaration,
            payload,
            now,
            proposal_id=proposal_id,
            supersedes=old_payload_hash,
        )

    def erase_payload(
        self,
        requester: str,
        key: str,
        now: int,
        *,
        proposal_id: str,
    ) -> Outcome[TxProposal]:
        """
        Build the ``data.erase`` proposal for a record.

        Returns:
            Result with the proposal, or UnknownActor, UnknownKey.
        """
        if self._registry.get(requester) is None:
            return failure(unknown_actor(requester))
        if self._ledger.get_state(key) is None:
            return failure(unknown_key(key))
        return build_proposal(
            proposal_id, self._registry.onchain_handle(requester), "data.erase", (key,), now
        )

    def discard(self, proposal_id: str) -> bool:
        """Drop the staged payload of a proposal that will never commit."""
        return self._staged.pop(proposal_id, None) is not None

    def on_block_committed(self, block: Block) -> None:
        """
        Settle payloads against a committed block.

        A staged payload is stored when its ``data.submit`` commits as Valid
        and dropped otherwise. A payload named by a committed erasure marker
        is deleted once no record ref without a marker still points at it.
        """
        erased: set[bytes] = set()
        for tx in block.txs:
            valid = tx.validation_code is ValidationCode.VALID
            payload = self._staged.pop(tx.proposal.proposal_id, None)
            if payload is not None and valid:
                self._store.put(payload)
            if not valid:
                continue
            for key, _ in tx.rwset.writes:
                if key.startswith(ERASURE_PREFIX):
                    erased.add(bytes.fromhex(key.rsplit("/", 1)[-1]))
        if not erased:
            return
        snapshot = self._ledger.snapshot()
        for payload_hash in sorted(erased):
            if self._has_live_ref(snapshot, payload_hash):
                logger.info("Payload still referenced", payload_hash=payload_hash.hex()[:16])
            elif self._store.delete(payload_hash):
                logger.info(
                    "Payload erased", payload_hash=payload_hash.hex()[:16], height=block.height
                )

    @staticmethod
    def _has_live_ref(snapshot: StateSnapshot, payload_hash: bytes) -> bool:
        for key in snapshot.keys_with_prefix(RECORD_PREFIX):
            parts = parse_record_key(key)
            if parts is None or parts[1] != payload_hash:
                continue
            if snapshot.get(erasure_key(parts[0], payload_hash)) is None:
                return True
        return False

    def read_own_records(self, subject: str, now: int) -> list[OwnRecord]:
        """
        Records about ``subject`` joined with their payloads.

        Records submitted after ``now`` are left out. Erased payloads come back
        as ``payload=None`` with ``erased=True``.
        """
        actor = self._registry.get(subject)
        if actor is None or not actor.is_subject:
            return []
        snapshot = self._ledger.snapshot()
        pseudo = pseudonymize(self._registry.salt, subject)
        records: list[OwnRecord] = []
        for key in snapshot.keys_with_prefix(f"record/{pseudo.hex()}/"):
            ref = self._ref_at(snapshot, key)
            if ref is None or ref.submitted_at > now:
                continue
            payload = None
            if snapshot.get(erasure_key(ref.subject_pseudo, ref.payload_hash)) is None:
                payload = self._store.get(ref.payload_hash)
            records.append(OwnRecord(ref=ref, payload=payload, erased=payload is None))
        return records

    def query_aggregate(
        self,
        requester: str | None,
        group_by_field: str,
        declaration_hash: bytes,
        now: int,
    ) -> Outcome[dict[str, int]]:
        """
        Count records per value of ``group_by_field``.

        A record counts when it was collected under the declaration, its
        subject's consent is Granted at ``now``, it is within retention and
        its payload is still held. Groups below the k-anonymity threshold
        are dropped.

        Returns:
            Result with ``{group: count}``, or Forbidden, UnknownActor,
            UnknownDeclaration, UnknownField.
        """
        if self._config.permissioned:
            if requester is None:
                return failure(
                    governance_error(ErrorCode.FORBIDDEN, "aggregate queries need a requester")
                )
            if self._registry.get(requester) is None:
                return failure(unknown_actor(requester))
        snapshot = self._ledger.snapshot()
        declaration = self._declaration_at(snapshot, declaration_hash)
        if isinstance(declaration, Failure):
            return declaration
        if group_by_field not in declaration.value.field_set:
            return failure(
                governance_error(
                    ErrorCode.UNKNOWN_FIELD,
                    f"{group_by_field} is not collected under this declaration",
                    (group_by_field,),
                )
            )
        retention = declaration.value.retention_days * self._config.day_seconds
        counts: Counter[str] = Counter()
        for key in snapshot.keys_with_prefix("record/"):
            ref = self._ref_at(snapshot, key)
            if ref is None or ref.declaration_hash != declaration_hash:
                continue
            if ref.submitted_at > now or now - ref.submitted_at > retention:
                continue
            if snapshot.get(erasure_key(ref.subject_pseudo, ref.payload_hash)) is not None:
                continue
            handle = PSEUDONYM_PREFIX + ref.subject_pseudo.hex()
            consent = _consent_of(snapshot, handle, declaration_hash)
            if consent_status_at(consent, now) is not ConsentState.GRANTED:
                continue
            payload = self._store.get(ref.payload_hash)
            value = payload.get(group_by_field) if payload is not None else None
            if value is not None:
                counts[value] += 1
        threshold = self._config.k_anonymity
        return success({group: n for group, n in sorted(counts.items()) if n >= threshold})

    def provenance_of(self, requester: str | None, key: str) -> Outcome[list[Attempt]]:
        """
        Every committed transaction that touched ``key``, valid or not.

        Returns:
            Result with the attempts in chain order, or UnknownKey.
        """
        attempts = self._ledger.get_attempts(key)
        if not attempts and self._ledger.get_state(key) is None:
            return failure(unknown_key(key))
        logger.debug("Provenance served", key=key, requester=requester, entries=len(attempts))
        return success(attempts)

    @staticmethod
    def _value(snapshot: StateSnapshot, key: str) -> bytes | None:
        entry = snapshot.get(key)
        return entry.value if entry is not None else None

    @staticmethod
    def _ref_at(snapshot: StateSnapshot, key: str) -> HealthRecordRef | None:
        entry = snapshot.get(key)
        if entry is None:
            return None
        decoded = decode_ref(entry.value, locator=entry.version)
        if isinstance(decoded, Failure):
            logger.warning("Unreadable record ref", key=key, error=str(decoded.error))
            return None
        return decoded.value

    def published_declaration(self, declaration_hash: bytes) -> Outcome[PurposeDeclaration]:
        """
        Declaration committed under ``declaration_hash``.

        Returns:
            Result with the declaration, or UnknownDeclaration.
        """
        return self._declaration_at(self._ledger.snapshot(), declaration_hash)

    @staticmethod
    def _declaration_at(
        snapshot: StateSnapshot,
        declaration_hash: bytes,
    ) -> Outcome[PurposeDeclaration]:
        entry = snapshot.get(declaration_key(declaration_hash.hex()))
        if entry is None:
            return failure(
                governance_error(
                    ErrorCode.UNKNOWN_DECLARATION,
                    f"declaration not published: {declaration_hash.hex()}",
                )
            )
        return parse_declaration(entry.value.decode("utf-8"))
