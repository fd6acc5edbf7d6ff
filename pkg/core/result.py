"""
Result type for governance outcomes.

Every ledger-facing operation either succeeds with a value or fails with a
``GovernanceError``; rejections are data, so the CLI, the HTTP layer and the
simulator can report them uniformly without catching exceptions.

Example:
    >>> from core.errors import illegal_transition
    >>> def revoke(state: str) -> Result[str, GovernanceError]:
    ...     if state != "Granted":
    ...         return failure(illegal_transition(state, "Revoked"))
    ...     return success("Revoked")
    ...
    >>> revoke("Denied").is_failure()
    True
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Never

if TYPE_CHECKING:
    from collections.abc import Callable

    from core.errors import GovernanceError


@dataclass(frozen=True, slots=True)
class Success[T]:
    """A successful outcome carrying ``value``."""

    value: T

    def is_success(self) -> bool:
        """Return True."""
        return True

    def is_failure(self) -> bool:
        """Return False."""
        return False

    def unwrap(self) -> T:
        """Return the carried value."""
        return self.value

    def unwrap_or(self, _default: T) -> T:
        """Return the carried value, ignoring the default."""
        return self.value

    def map[U](self, func: Callable[[T], U]) -> Success[U]:
        """Apply ``func`` to the carried value."""
        return Success(func(self.value))


@dataclass(frozen=True, slots=True)
class Failure[E]:
    """A rejected outcome carrying ``error``."""

    error: E

    def is_success(self) -> bool:
        """Return False."""
        return False

    def is_failure(self) -> bool:
        """Return True."""
        return True

    def unwrap(self) -> Never:
        """
        Refuse to produce a value.

        Raises:
            ValueError: Always; a rejection has no value.
        """
        raise ValueError(f"Cannot unwrap Failure: {self.error}")

    def unwrap_or[T](self, default: T) -> T:
        """Return ``default``."""
        return default

    def map[T, U](self, _func: Callable[[T], U]) -> Failure[E]:
        """Return self; rejections pass through unchanged."""
        return self


type Result[T, E] = Success[T] | Failure[E]

type Outcome[T] = Result[T, GovernanceError]


def success[T](value: T) -> Success[T]:
    """Wrap ``value`` as a Success."""
    return Success(value)


def failure[E](error: E) -> Failure[E]:
    """Wrap ``error`` as a Failure."""
    return Failure(error)
