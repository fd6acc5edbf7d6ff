"""Types for membership and signing."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum


class Role(StrEnum):
    """Roles an actor can hold in the network."""

    DATA_SUBJECT = "DataSubject"
    DATA_CONTROLLER = "DataController"
    DATA_PROCESSOR = "DataProcessor"
    ORDERER = "Orderer"
    AUDITOR = "Auditor"


ORG_BOUND_ROLES: frozenset[Role] = frozenset({Role.DATA_CONTROLLER, Role.DATA_PROCESSOR})

SEED_SIZE = 32


@dataclass(frozen=True, slots=True)
class Actor:
    """
    A registered member of the network.

    Attributes:
        actor_id: Unique identifier in the registry.
        org_id: Parent organization, required for controllers and processors.
        roles: Roles held; empty only for organization records.
        public_tag: 32-byte value derived from the signing seed.
        is_organization: True for organization records.
        active: False once deactivated; entries are never removed.
    """

    actor_id: str
    org_id: str | None
    roles: frozenset[Role]
    public_tag: bytes
    is_organization: bool = False
    active: bool = True

    def has_role(self, role: Role) -> bool:
        """Check whether the actor holds ``role``."""
        return role in self.roles

    @property
    def is_subject(self) -> bool:
        """True for data subjects (citizens)."""
        return Role.DATA_SUBJECT in self.roles

    def to_dict(self) -> dict[str, object]:
        """Return a JSON-ready view; never includes the seed."""
        return {
            "actor_id": self.actor_id,
            "org_id": self.org_id,
            "roles": sorted(role.value for role in self.roles),
            "public_tag": self.public_tag.hex(),
            "is_organization": self.is_organization,
            "active": self.active,
        }


@dataclass(frozen=True, slots=True)
class Credential:
    """Signing material of one actor. Stays in the registry file only."""

    actor_id: str
    seed: bytes = field(repr=False)

    def __post_init__(self) -> None:
        """Validate the seed length."""
        if len(self.seed) != SEED_SIZE:
            msg = f"seed must be {SEED_SIZE} bytes"
            raise ValueError(msg)
