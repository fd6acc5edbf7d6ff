"""
Nodal points: the raw-chain and analysis read endpoints.

Every query is answered from committed state only and never writes. State
routes read one snapshot taken when the request starts.
"""

from __future__ import annotations

import re
from typing import TYPE_CHECKING, Any

from core.errors import ErrorCode, bad_params, governance_error, unknown_actor, unknown_key
from core.logging import bind_context, get_logger, unbind_context
from core.result import Failure
from services.consent.codec import consent_key, decode_record
from services.consent.machine import consent_status_at
from services.consent.types import ConsentRecord
from services.identity.signing import PSEUDONYM_PREFIX
from services.nodal.types import QueryRequest, QueryResponse

if TYPE_CHECKING:
    from collections.abc import Callable

    from core.errors import GovernanceError
    from services.identity.registry import ActorRegistry
    from services.ledger.chain import Ledger
    from services.pipeline.service import DataPipeline

logger = get_logger(__name__)

type Handler = Callable[[QueryRequest, re.Match[str]], QueryResponse]

HEX_DIGEST = re.compile(r"[0-9a-f]{64}")


def _digest_param(value: str | None, name: str) -> bytes | GovernanceError:
    if value is None:
        return bad_params(f"missing parameter: {name}")
    if not HEX_DIGEST.fullmatch(value):
        return bad_params(f"{name} must be 64 lowercase hex characters")
    return bytes.fromhex(value)


def _int_param(value: str, name: str) -> int | GovernanceError:
    if not (value.isascii() and value.isdigit()):
        return bad_params(f"{name} must be a non-negative integer")
    return int(value)


class NodalService:
    """
    Route read requests to the ledger and the data pipeline.

    Example:
        >>> service = NodalService(ledger, registry, pipeline)
        >>> service.handle_query(QueryRequest("/chain/block/0")).ok
        True
    """

    def __init__(
        self,
        ledger: Ledger,
        registry: ActorRegistry,
        pipeline: DataPipeline,
        *,
        clock: Callable[[], int] | None = None,
    ) -> None:
        """
        Serve queries over ``ledger``.

        Args:
            ledger: Committed chain and state.
            registry: Actor registry, used to map subjects to handles.
            pipeline: Pipeline bound to ``ledger`` for aggregate and provenance queries.
            clock: Source of "now"; defaults to the tip block's timestamp.
        """
        self._ledger = ledger
        self._registry = registry
        self._pipeline = pipeline
        self._clock = clock or (lambda: ledger.tip.timestamp)
        self._routes: tuple[tuple[re.Pattern[str], Handler], ...] = (
            (re.compile(r"/chain/block/(?P<height>[^/]+)"), self._block),
            (re.compile(r"/chain/verify"), self._verify),
            (re.compile(r"/state/(?P<key>.+)"), self._state),
            (re.compile(r"/history/(?P<key>.+)"), self._history),
            (re.compile(r"/analysis/aggregate"), self._aggregate),
            (re.compile(r"/consent/(?P<subject>[^/]+)/(?P<decl>[^/]+)"), self._consent),
            (re.compile(r"/provenance/(?P<key>.+)"), self._provenance),
        )

    @property
    def permissioned(self) -> bool:
        """True when every request must name a registered actor."""
        return self._pipeline.config.permissioned

    def handle_query(self, request: QueryRequest) -> QueryResponse:
        """
        Answer one read request.

        Returns:
            A response carrying the payload, or UnknownRoute, BadParams,
            Forbidden, or the error of the component that was asked.
        """
        endpoint = "/" + request.endpoint.strip("/")
        bind_context(request_path=endpoint)
        try:
            denied = self._check_reader(request.actor)
            if denied is not None:
                return self._rejected(denied)
            for pattern, handler in self._routes:
                match = pattern.fullmatch(endpoint)
                if match is not None:
                    response = handler(request, match)
                    if response.error is not None:
                        return self._rejected(response.error)
                    return response
            return self._rejected(
                governance_error(ErrorCode.UNKNOWN_ROUTE, f"no route for {endpoint}")
            )
        finally:
            unbind_context("request_path")

    def _rejected(self, error: GovernanceError) -> QueryResponse:
        logger.info("Query rejected", error=error.name, message=error.message)
        return QueryResponse.failure(error)

    def _check_reader(self, actor: str | None) -> GovernanceError | None:
        if not self.permissioned:
            return None
        if actor is None:
            return governance_error(ErrorCode.FORBIDDEN, "reads require a registered actor")
        record = self._registry.get(actor)
        if record is None:
            return unknown_actor(actor)
        if not record.active:
            return governance_error(ErrorCode.FORBIDDEN, f"{actor} is deactivated")
        return None

    def _now(self, request: QueryRequest) -> int | GovernanceError:
        at = request.params.get("at")
        return self._clock() if at is None else _int_param(at, "at")

    def _block(self, _request: QueryRequest, match: re.Match[str]) -> QueryResponse:
        height = _int_param(match["height"], "height")
        if not isinstance(height, int):
            return QueryResponse.failure(height)
        block = self._ledger.block(height)
        if block is None:
            return QueryResponse.failure(
                bad_params(f"no block at height {height}; tip is {self._ledger.height}")
            )
        return QueryResponse.success(block.to_dict())

    def _verify(self, _request: QueryRequest, _match: re.Match[str]) -> QueryResponse:
        verdict = self._ledger.verify()
        return QueryResponse.success(
            {
                "ok": verdict.ok,
                "first_bad_height": verdict.first_bad_height,
                "reason": verdict.reason,
                "height": self._ledger.height,
            }
        )

    def _state(self, _request: QueryRequest, match: re.Match[str]) -> QueryResponse:
        entry = self._ledger.snapshot().get(match["key"])
        if entry is None:
            return QueryResponse.failure(unknown_key(match["key"]))
        return QueryResponse.success(
            {"key": match["key"], "value": entry.value.hex(), "version": entry.version.render()}
        )

    def _history(self, _request: QueryRequest, match: re.Match[str]) -> QueryResponse:
        items = self._ledger.get_history(match["key"])
        if not items:
            return QueryResponse.failure(unknown_key(match["key"]))
        return QueryResponse.success([item.to_dict() for item in items])

    def _aggregate(self, request: QueryRequest, _match: re.Match[str]) -> QueryResponse:
        group_by = request.params.get("field")
        if not group_by:
            return QueryResponse.failure(bad_params("missing parameter: field"))
        declaration_hash = _digest_param(request.params.get("decl"), "decl")
        if not isinstance(declaration_hash, bytes):
            return QueryResponse.failure(declaration_hash)
        now = self._now(request)
        if not isinstance(now, int):
            return QueryResponse.failure(now)
        counts = self._pipeline.query_aggregate(request.actor, group_by, declaration_hash, now)
        if isinstance(counts, Failure):
            return QueryResponse.failure(counts.error)
        return QueryResponse.success(counts.value)

    def _consent(self, request: QueryRequest, match: re.Match[str]) -> QueryResponse:
        declaration_hash = _digest_param(match["decl"], "decl")
        if not isinstance(declaration_hash, bytes):
            return QueryResponse.failure(declaration_hash)
        now = self._now(request)
        if not isinstance(now, int):
            return QueryResponse.failure(now)
        handle = self._subject_handle(match["subject"])
        if handle is None:
            return QueryResponse.failure(unknown_actor(match["subject"]))
        record = self._consent_record(handle, declaration_hash)
        body: dict[str, Any] = record.to_dict()
        body["status_at"] = {"t": now, "state": consent_status_at(record, now).value}
        return QueryResponse.success(body)

    def _provenance(self, request: QueryRequest, match: re.Match[str]) -> QueryResponse:
        attempts = self._pipeline.provenance_of(request.actor, match["key"])
        if isinstance(attempts, Failure):
            return QueryResponse.failure(attempts.error)
        return QueryResponse.success([attempt.to_dict() for attempt in attempts])

    def _subject_handle(self, subject: str) -> str | None:
        if subject.startswith(PSEUDONYM_PREFIX):
            return subject if self._registry.resolve(subject) is not None else None
        actor = self._registry.get(subject)
        if actor is None or not actor.is_subject:
            return None
        return self._registry.onchain_handle(subject)

    def _consent_record(self, handle: str, declaration_hash: bytes) -> ConsentRecord:
        entry = self._ledger.snapshot().get(consent_key(handle, declaration_hash))
        if entry is None:
            return ConsentRecord.initial(handle, declaration_hash)
        decoded = decode_record(entry.value)
        if isinstance(decoded, Failure):
            logger.warning("Unreadable consent record", handle=handle)
            return ConsentRecord.initial(handle, declaration_hash)
        return decoded.value
