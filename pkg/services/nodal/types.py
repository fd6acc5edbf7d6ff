"""Types for the nodal query surface."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from core.errors import ErrorCode

if TYPE_CHECKING:
    from collections.abc import Mapping

    from core.errors import GovernanceError


STATUS_BY_CODE: dict[ErrorCode, int] = {
    ErrorCode.UNKNOWN_ROUTE: 404,
    ErrorCode.UNKNOWN_KEY: 404,
    ErrorCode.FORBIDDEN: 403,
}


@dataclass(frozen=True, slots=True)
class QueryRequest:
    """
    A read request.

    Attributes:
        endpoint: Path such as ``/state/decl/ab12``.
        params: Query string parameters.
        actor: Registered actor id asking, when known.
    """

    endpoint: str
    params: Mapping[str, str] = field(default_factory=dict)
    actor: str | None = None


@dataclass(frozen=True, slots=True)
class QueryResponse:
    """Answer to a ``QueryRequest``; ``error`` is set exactly when ``ok`` is False."""

    ok: bool
    payload: Any = None
    error: GovernanceError | None = None

    @classmethod
    def success(cls, payload: Any) -> QueryResponse:
        """Successful answer."""
        return cls(ok=True, payload=payload)

    @classmethod
    def failure(cls, error: GovernanceError) -> QueryResponse:
        """Rejected request."""
        return cls(ok=False, error=error)

    @property
    def status_code(self) -> int:
        """HTTP status for this answer."""
        if self.error is None:
            return 200
        return STATUS_BY_CODE.get(self.error.code, 400)

    def to_dict(self) -> dict[str, Any]:
        """JSON body."""
        if self.error is None:
            return {"ok": True, "payload": self.payload}
        return {"ok": False, "error": self.error.name, "message": self.error.message}


@dataclass(frozen=True, slots=True)
class AuditExport:
    """Newline-delimited JSON lines plus the SHA-256 of the file they form."""

    lines: tuple[str, ...]
    digest: str

    @property
    def content(self) -> str:
        """File text; empty when there are no lines."""
        return "".join(f"{line}\n" for line in self.lines)
