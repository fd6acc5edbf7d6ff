"""Types for purpose declarations."""

from __future__ import annotations

import re
from dataclasses import dataclass

FIELD_NAME = re.compile(r"[a-z0-9_]+")

DECLARATION_KEYS: tuple[str, ...] = (
    "id",
    "controller",
    "processors",
    "purpose",
    "fields",
    "retention_days",
    "scenario",
)

type DeclarationHash = bytes


@dataclass(frozen=True, slots=True)
class PurposeDeclaration:
    """
    A parsed LegalProse document.

    Declarations are immutable: a changed purpose is a new declaration with a
    new hash, and consent given to the old one does not carry over.

    Attributes:
        declaration_id: Document identifier.
        controller: Actor id of the data controller.
        processors: Actor ids of the processors, in declared order.
        purpose_text: The informed purpose.
        allowed_fields: Field names that may be collected, first-seen order.
        retention_days: How long records stay usable for processing.
        scenario: Free-text context of the collection.
    """

    declaration_id: str
    controller: str
    processors: tuple[str, ...]
    purpose_text: str
    allowed_fields: tuple[str, ...]
    retention_days: int
    scenario: str

    def __post_init__(self) -> None:
        """Validate invariants that parsing already guarantees."""
        if not self.allowed_fields:
            msg = "allowed_fields cannot be empty"
            raise ValueError(msg)
        if self.retention_days < 1:
            msg = "retention_days must be at least 1"
            raise ValueError(msg)
        if not self.purpose_text:
            msg = "purpose_text cannot be empty"
            raise ValueError(msg)

    @property
    def field_set(self) -> frozenset[str]:
        """Allowed fields as a set."""
        return frozenset(self.allowed_fields)

    def to_dict(self) -> dict[str, object]:
        """Return a JSON-ready view."""
        return {
            "id": self.declaration_id,
            "controller": self.controller,
            "processors": list(self.processors),
            "purpose": self.purpose_text,
            "fields": sorted(self.allowed_fields),
            "retention_days": self.retention_days,
            "scenario": self.scenario,
        }
