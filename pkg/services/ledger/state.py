"""Versioned key-value world state."""

from __future__ import annotations

import hashlib
from types import MappingProxyType
from typing import TYPE_CHECKING, NamedTuple

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Mapping


class Version(NamedTuple):
    """Position of the transaction that wrote a value."""

    height: int
    tx_index: int

    def render(self) -> str:
        """Render as ``height.tx_index``."""
        return f"{self.height}.{self.tx_index}"

    @classmethod
    def parse(cls, text: str) -> Version:
        """Parse ``height.tx_index``."""
        height, _, index = text.partition(".")
        return cls(int(height), int(index))


class VersionedValue(NamedTuple):
    """A committed value and the version that wrote it."""

    value: bytes
    version: Version


def digest_entries(entries: Iterable[tuple[str, VersionedValue]]) -> bytes:
    """SHA-256 over sorted ``key=value_hex@height.txidx`` lines."""
    lines = sorted(
        f"{key}={entry.value.hex()}@{entry.version.render()}\n" for key, entry in entries
    )
    return hashlib.sha256("".join(lines).encode("utf-8")).digest()


class StateSnapshot:
    """
    Immutable view of the world state between two commits.

    Simulations and queries run against snapshots so they never observe a
    half-applied block.
    """

    __slots__ = ("_entries", "_height")

    def __init__(self, entries: Mapping[str, VersionedValue], height: int) -> None:
        """Freeze a copy of ``entries`` taken at chain ``height``."""
        self._entries: Mapping[str, VersionedValue] = MappingProxyType(dict(entries))
        self._height = height

    @property
    def height(self) -> int:
        """Chain height the snapshot was taken at."""
        return self._height

    def get(self, key: str) -> VersionedValue | None:
        """Return the committed entry or None."""
        return self._entries.get(key)

    def version_of(self, key: str) -> Version | None:
        """Return the version of ``key`` or None when absent."""
        entry = self._entries.get(key)
        return entry.version if entry is not None else None

    def keys_with_prefix(self, prefix: str) -> list[str]:
        """Sorted keys starting with ``prefix``."""
        return sorted(key for key in self._entries if key.startswith(prefix))

    def items(self) -> Iterator[tuple[str, VersionedValue]]:
        """Iterate over entries."""
        return iter(self._entries.items())

    def __len__(self) -> int:
        """Number of keys."""
        return len(self._entries)

    def digest(self) -> bytes:
        """State digest of the snapshot."""
        return digest_entries(self._entries.items())


class WorldState:
    """Mutable state owned by the single committer."""

    def __init__(self) -> None:
        """Start empty."""
        self._entries: dict[str, VersionedValue] = {}

    def get(self, key: str) -> VersionedValue | None:
        """Return the committed entry or None."""
        return self._entries.get(key)

    def version_of(self, key: str) -> Version | None:
        """Return the version of ``key`` or None when absent."""
        entry = self._entries.get(key)
        return entry.version if entry is not None else None

    def apply(self, writes: Iterable[tuple[str, bytes]], version: Version) -> None:
        """Apply the writes of one valid transaction."""
        for key, value in writes:
            self._entries[key] = VersionedValue(value, version)

    def snapshot(self, height: int) -> StateSnapshot:
        """Freeze the current state."""
        return StateSnapshot(self._entries, height)

    def items(self) -> Iterator[tuple[str, VersionedValue]]:
        """Iterate over entries."""
        return iter(self._entries.items())

    def __len__(self) -> int:
        """Number of keys."""
        return len(self._entries)

    def digest(self) -> bytes:
        """State digest."""
        return digest_entries(self._entries.items())
