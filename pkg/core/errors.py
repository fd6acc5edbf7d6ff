"""Governance error types shared by every module."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from enum import StrEnum


class ErrorCode(StrEnum):
    """Error names; the values are what the CLI and HTTP API report."""

    # identity
    DUPLICATE_ACTOR = "DuplicateActor"
    UNKNOWN_ORGANIZATION = "UnknownOrganization"
    ROLE_ORG_MISMATCH = "RoleOrgMismatch"
    UNKNOWN_ACTOR = "UnknownActor"
    INACTIVE_ACTOR = "InactiveActor"
    # legalprose
    MISSING_KEY = "MissingKey"
    EMPTY_FIELDS = "EmptyFields"
    BAD_RETENTION = "BadRetention"
    UNKNOWN_KEY = "UnknownKey"
    DUPLICATE_KEY = "DuplicateKey"
    BAD_FIELD_NAME = "BadFieldName"
    MALFORMED_RECORD = "MalformedRecord"
    # consent
    ILLEGAL_TRANSITION = "IllegalTransition"
    NOT_A_CONTROLLER = "NotAController"
    NOT_THE_SUBJECT = "NotTheSubject"
    NON_MONOTONIC_TIMESTAMP = "NonMonotonicTimestamp"
    # contracts
    UNKNOWN_CONTRACT = "UnknownContract"
    UNKNOWN_ACTION = "UnknownAction"
    BAD_ARGS = "BadArgs"
    UNKNOWN_DECLARATION = "UnknownDeclaration"
    DUPLICATE_DECLARATION = "DuplicateDeclaration"
    DUPLICATE_RECORD = "DuplicateRecord"
    MINIMIZATION_VIOLATION = "MinimizationViolation"
    CONSENT_REQUIRED = "ConsentRequired"
    # ledger / consensus
    BROKEN_LINK = "BrokenLink"
    DUPLICATE_TX = "DuplicateTx"
    NO_ENDORSEMENT = "NoEndorsement"
    BAD_SIGNATURE = "BadSignature"
    # pipeline
    ROLE_DENIED = "RoleDenied"
    UNKNOWN_FIELD = "UnknownField"
    # nodal / cli
    UNKNOWN_ROUTE = "UnknownRoute"
    BAD_PARAMS = "BadParams"
    BAD_RANGE = "BadRange"
    FORBIDDEN = "Forbidden"
    USAGE_ERROR = "UsageError"


@dataclass(frozen=True, slots=True)
class GovernanceError:
    """
    A rejected operation.

    Attributes:
        code: Error name.
        message: Human-readable explanation.
        details: Offending items (field names, key names), when there are any.
    """

    code: ErrorCode
    message: str
    details: tuple[str, ...] = ()

    def __str__(self) -> str:
        """Return ``"<code>: <message>"``."""
        return f"{self.code.value}: {self.message}"

    @property
    def name(self) -> str:
        """Return the error name as reported to operators."""
        return self.code.value

    def to_dict(self) -> dict[str, object]:
        """Return a JSON-ready representation."""
        return {"error": self.code.value, "message": self.message, "details": list(self.details)}


def governance_error(
    code: ErrorCode,
    message: str,
    details: Iterable[str] = (),
) -> GovernanceError:
    """Create an error with the given code."""
    return GovernanceError(code=code, message=message, details=tuple(details))


def duplicate_actor(actor_id: str) -> GovernanceError:
    """Create a duplicate registration error."""
    return governance_error(ErrorCode.DUPLICATE_ACTOR, f"actor already registered: {actor_id}")


def unknown_actor(actor_id: str) -> GovernanceError:
    """Create an unknown actor error."""
    return governance_error(ErrorCode.UNKNOWN_ACTOR, f"actor not registered: {actor_id}")


def missing_key(name: str) -> GovernanceError:
    """Create a missing key error."""
    return governance_error(ErrorCode.MISSING_KEY, f"missing key: {name}", (name,))


def unknown_key(name: str) -> GovernanceError:
    """Create an unknown key error."""
    return governance_error(ErrorCode.UNKNOWN_KEY, f"unknown key: {name}", (name,))


def duplicate_key(name: str) -> GovernanceError:
    """Create a duplicate key error."""
    return governance_error(ErrorCode.DUPLICATE_KEY, f"duplicate key: {name}", (name,))


def illegal_transition(current: str, target: str) -> GovernanceError:
    """Create an illegal consent transition error."""
    return governance_error(
        ErrorCode.ILLEGAL_TRANSITION,
        f"cannot move from {current} to {target}",
        (current, target),
    )


def minimization_violation(fields: Iterable[str]) -> GovernanceError:
    """Create a data minimization error listing the undeclared fields."""
    extra = tuple(fields)
    return governance_error(
        ErrorCode.MINIMIZATION_VIOLATION,
        f"fields outside the declared purpose: {', '.join(extra)}",
        extra,
    )


def consent_required(subject: str, declaration_hex: str) -> GovernanceError:
    """Create a missing consent error."""
    return governance_error(
        ErrorCode.CONSENT_REQUIRED,
        f"no granted consent for {subject} under {declaration_hex[:16]}",
    )


def bad_args(message: str) -> GovernanceError:
    """Create a malformed contract arguments error."""
    return governance_error(ErrorCode.BAD_ARGS, message)


def bad_params(message: str) -> GovernanceError:
    """Create a malformed query parameters error."""
    return governance_error(ErrorCode.BAD_PARAMS, message)
