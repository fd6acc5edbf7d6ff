"""Membership registry for organizations and actors."""

from __future__ import annotations

import re
import secrets
import threading
from typing import TYPE_CHECKING

from core.errors import (
    ErrorCode,
    duplicate_actor,
    governance_error,
    unknown_actor,
)
from core.logging import get_logger
from core.result import failure, success
from services.identity.signing import (
    DEFAULT_SCHEME,
    PSEUDONYM_PREFIX,
    SignatureScheme,
    derive_public_tag,
    pseudonym_handle,
)
from services.identity.types import ORG_BOUND_ROLES, SEED_SIZE, Actor, Credential, Role

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator

    from core.result import Outcome

logger = get_logger(__name__)

ACTOR_ID = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]*")


class ActorRegistry:
    """
    Append-only registry of actors and their credentials.

    Entries are never removed; deactivation replaces the indexed view with an
    inactive copy while the registration record stays in ``records``.
    Reads are lock-free; mutations are serialized.

    Example:
        >>> registry = ActorRegistry(salt=bytes(32))
        >>> registry.register_actor("citizen-ana", None, {Role.DATA_SUBJECT}).is_success()
        True
    """

    def __init__(self, salt: bytes, scheme: SignatureScheme | None = None) -> None:
        """
        Initialize an empty registry.

        Args:
            salt: Network salt used to pseudonymize data subjects.
            scheme: Signing scheme; defaults to the keyed-hash scheme.
        """
        self._salt = salt
        self._scheme = scheme or DEFAULT_SCHEME
        self._actors: dict[str, Actor] = {}
        self._credentials: dict[str, Credential] = {}
        self._handles: dict[str, str] = {}
        self._records: list[Actor] = []
        self._lock = threading.Lock()

    @property
    def salt(self) -> bytes:
        """Network salt."""
        return self._salt

    @property
    def scheme(self) -> SignatureScheme:
        """Signing scheme in use."""
        return self._scheme

    @property
    def records(self) -> tuple[Actor, ...]:
        """Every registration and deactivation record, oldest first."""
        return tuple(self._records)

    def __len__(self) -> int:
        """Return the number of registered actors (organizations included)."""
        return len(self._actors)

    def __contains__(self, actor_id: object) -> bool:
        """Check whether ``actor_id`` is registered."""
        return actor_id in self._actors

    def __iter__(self) -> Iterator[Actor]:
        """Iterate over current actor views in registration order."""
        return iter(list(self._actors.values()))

    def register_organization(self, org_id: str, seed: bytes | None = None) -> Outcome[Actor]:
        """
        Register an organization record.

        Args:
            org_id: Organization identifier.
            seed: Signing seed; random when omitted.

        Returns:
            Result with the organization record or DuplicateActor.
        """
        if not ACTOR_ID.fullmatch(org_id):
            return failure(governance_error(ErrorCode.BAD_ARGS, f"invalid org id: {org_id!r}"))
        return self._append(org_id, None, frozenset(), seed, is_organization=True)

    def register_actor(
        self,
        actor_id: str,
        org_id: str | None,
        roles: Iterable[Role],
        seed: bytes | None = None,
    ) -> Outcome[Actor]:
        """
        Register an actor with a fresh credential.

        Args:
            actor_id: Unique identifier.
            org_id: Parent organization; required for controllers and processors,
                forbidden for data subjects.
            roles: At least one role.
            seed: Signing seed; random when omitted.

        Returns:
            Result with the new actor, or DuplicateActor, UnknownOrganization,
            RoleOrgMismatch.
        """
        role_set = frozenset(roles)
        if not ACTOR_ID.fullmatch(actor_id):
            return failure(
                governance_error(ErrorCode.BAD_ARGS, f"invalid actor id: {actor_id!r}")
            )
        if actor_id in self._actors:
            return failure(duplicate_actor(actor_id))
        if not role_set:
            return failure(
                governance_error(ErrorCode.ROLE_ORG_MISMATCH, "an actor needs at least one role")
            )
        if Role.DATA_SUBJECT in role_set and org_id is not None:
            return failure(
                governance_error(
                    ErrorCode.ROLE_ORG_MISMATCH,
                    f"data subject {actor_id} cannot belong to an organization",
                )
            )
        if role_set & ORG_BOUND_ROLES and org_id is None:
            return failure(
                governance_error(
                    ErrorCode.ROLE_ORG_MISMATCH,
                    f"{actor_id} needs a parent organization for its roles",
                )
            )
        if org_id is not None:
            org = self._actors.get(org_id)
            if org is None or not org.is_organization:
                return failure(
                    governance_error(
                        ErrorCode.UNKNOWN_ORGANIZATION, f"organization not registered: {org_id}"
                    )
                )
        return self._append(actor_id, org_id, role_set, seed, is_organization=False)

    def deactivate(self, actor_id: str) -> Outcome[Actor]:
        """Flag ``actor_id`` inactive; the record stays resolvable."""
        with self._lock:
            actor = self._actors.get(actor_id)
            if actor is None:
                return failure(unknown_actor(actor_id))
            inactive = Actor(
                actor_id=actor.actor_id,
                org_id=actor.org_id,
                roles=actor.roles,
                public_tag=actor.public_tag,
                is_organization=actor.is_organization,
                active=False,
            )
            self._actors[actor_id] = inactive
            self._records.append(inactive)
        logger.info("Actor deactivated", actor_id=actor_id)
        return success(inactive)

    def _append(
        self,
        actor_id: str,
        org_id: str | None,
        roles: frozenset[Role],
        seed: bytes | None,
        *,
        is_organization: bool,
    ) -> Outcome[Actor]:
        """Append a new record under the registry lock."""
        seed = seed if seed is not None else secrets.token_bytes(SEED_SIZE)
        with self._lock:
            if actor_id in self._actors:
                return failure(duplicate_actor(actor_id))
            actor = Actor(
                actor_id=actor_id,
                org_id=org_id,
                roles=roles,
                public_tag=derive_public_tag(seed),
                is_organization=is_organization,
            )
            self._actors[actor_id] = actor
            self._credentials[actor_id] = Credential(actor_id=actor_id, seed=seed)
            self._records.append(actor)
            if actor.is_subject:
                self._handles[pseudonym_handle(self._salt, actor_id)] = actor_id
        logger.debug(
            "Actor registered",
            actor_id=actor_id,
            org_id=org_id,
            roles=sorted(role.value for role in roles),
            is_organization=is_organization,
        )
        return success(actor)

    def get(self, actor_id: str) -> Actor | None:
        """Return the actor or None."""
        return self._actors.get(actor_id)

    def require(self, actor_id: str) -> Outcome[Actor]:
        """Return the actor, or UnknownActor."""
        actor = self._actors.get(actor_id)
        if actor is None:
            return failure(unknown_actor(actor_id))
        return success(actor)

    def credential(self, actor_id: str) -> Credential | None:
        """Return the signing credential of ``actor_id``."""
        return self._credentials.get(actor_id)

    def sign_as(self, actor_id: str, message: bytes) -> Outcome[bytes]:
        """Sign ``message`` with the credential of an active actor."""
        actor = self._actors.get(actor_id)
        if actor is None:
            return failure(unknown_actor(actor_id))
        if not actor.active:
            return failure(
                governance_error(ErrorCode.INACTIVE_ACTOR, f"actor is deactivated: {actor_id}")
            )
        return success(self._scheme.sign(self._credentials[actor_id].seed, message))

    def verify(self, actor_id: str, message: bytes, signature: bytes) -> Outcome[bool]:
        """
        Check a signature.

        Returns:
            Result with True iff ``signature`` matches, or UnknownActor.
        """
        credential = self._credentials.get(actor_id)
        if credential is None:
            return failure(unknown_actor(actor_id))
        return success(self._scheme.verify(credential.seed, message, signature))

    def verify_handle(self, handle: str, message: bytes, signature: bytes) -> bool:
        """Verify a signature made by the actor behind an on-chain handle."""
        actor = self.resolve(handle)
        if actor is None:
            return False
        return self.verify(actor.actor_id, message, signature).unwrap_or(False)

    def onchain_handle(self, actor_id: str) -> str:
        """Return the identity an actor carries on-chain (pseudonym for data subjects)."""
        actor = self._actors.get(actor_id)
        if actor is not None and actor.is_subject:
            return pseudonym_handle(self._salt, actor_id)
        return actor_id

    def resolve(self, handle: str) -> Actor | None:
        """Map an on-chain handle back to the actor."""
        if handle.startswith(PSEUDONYM_PREFIX):
            actor_id = self._handles.get(handle)
            return self._actors.get(actor_id) if actor_id is not None else None
        actor = self._actors.get(handle)
        # a subject's raw id is never a valid on-chain handle
        if actor is not None and actor.is_subject:
            return None
        return actor


def register_actor(
    registry: ActorRegistry,
    actor_id: str,
    org_id: str | None,
    roles: Iterable[Role],
    seed: bytes | None = None,
) -> Outcome[Actor]:
    """Register an actor in ``registry``."""
    return registry.register_actor(actor_id, org_id, roles, seed)


def verify(
    registry: ActorRegistry,
    actor_id: str,
    message: bytes,
    signature: bytes,
) -> Outcome[bool]:
    """Verify a signature against the registered credential of ``actor_id``."""
    return registry.verify(actor_id, message, signature)
