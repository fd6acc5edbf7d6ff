"""Read-write set recording over a snapshot."""

from __future__ import annotations

from typing import TYPE_CHECKING

from services.contracts.types import ReadWriteSet

if TYPE_CHECKING:
    from services.ledger.state import StateSnapshot, Version


class RWSetBuilder:
    """
    Records reads and buffers writes while a contract runs.

    The first read of a key pins the version it observed. Reads see the
    snapshot only, never the buffered writes of the same simulation.
    """

    def __init__(self, snapshot: StateSnapshot) -> None:
        """Start recording against ``snapshot``."""
        self._snapshot = snapshot
        self._reads: dict[str, Version | None] = {}
        self._writes: dict[str, bytes] = {}

    @property
    def snapshot(self) -> StateSnapshot:
        """Snapshot being simulated against."""
        return self._snapshot

    def get(self, key: str) -> bytes | None:
        """Read ``key`` and record its version."""
        entry = self._snapshot.get(key)
        self._reads.setdefault(key, entry.version if entry is not None else None)
        return entry.value if entry is not None else None

    def exists(self, key: str) -> bool:
        """Read ``key`` and report whether it is set."""
        return self.get(key) is not None

    def put(self, key: str, value: bytes) -> None:
        """Buffer a write."""
        self._writes[key] = value

    def build(self) -> ReadWriteSet:
        """Freeze into a sorted read-write set."""
        return ReadWriteSet(
            reads=tuple(sorted(self._reads.items())),
            writes=tuple(sorted(self._writes.items())),
        )
