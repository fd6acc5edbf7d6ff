"""Off-chain payload stores keyed by payload hash."""

from __future__ import annotations

import threading
from typing import TYPE_CHECKING, Protocol, runtime_checkable

from core.logging import get_logger
from core.result import Failure
from services.pipeline.records import decode_payload

if TYPE_CHECKING:
    from pathlib import Path

    from services.pipeline.types import HealthRecordPayload

logger = get_logger(__name__)


@runtime_checkable
class PayloadStore(Protocol):
    """Storage for payloads that never go on-chain."""

    def put(self, payload: HealthRecordPayload) -> bytes:
        """Store ``payload`` and return its hash."""
        ...

    def get(self, payload_hash: bytes) -> HealthRecordPayload | None:
        """Payload for ``payload_hash`` or None."""
        ...

    def delete(self, payload_hash: bytes) -> bool:
        """Remove a payload; True when something was removed."""
        ...

    def __contains__(self, payload_hash: object) -> bool:
        """Whether a payload is stored."""
        ...

    def __len__(self) -> int:
        """Number of stored payloads."""
        ...


class MemoryPayloadStore:
    """Dict-backed store for simulations and tests."""

    def __init__(self) -> None:
        """Start empty."""
        self._payloads: dict[bytes, HealthRecordPayload] = {}
        self._lock = threading.Lock()

    def put(self, payload: HealthRecordPayload) -> bytes:
        """Store ``payload`` and return its hash."""
        digest = payload.payload_hash()
        with self._lock:
            self._payloads[digest] = payload
        return digest

    def get(self, payload_hash: bytes) -> HealthRecordPayload | None:
        """Payload for ``payload_hash`` or None."""
        return self._payloads.get(payload_hash)

    def delete(self, payload_hash: bytes) -> bool:
        """Remove a payload."""
        with self._lock:
            return self._payloads.pop(payload_hash, None) is not None

    def __contains__(self, payload_hash: object) -> bool:
        """Whether a payload is stored."""
        return payload_hash in self._payloads

    def __len__(self) -> int:
        """Number of stored payloads."""
        return len(self._payloads)


class FilePayloadStore:
    """
    One file per payload, named by the hex hash and holding the canonical
    ``field=value`` lines.
    """

    def __init__(self, directory: Path) -> None:
        """Use ``directory``, creating it when missing."""
        self._directory = directory
        self._directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, payload_hash: bytes) -> Path:
        return self._directory / payload_hash.hex()

    def put(self, payload: HealthRecordPayload) -> bytes:
        """Store ``payload`` and return its hash."""
        digest = payload.payload_hash()
        with self._lock:
            self._path(digest).write_bytes(payload.canonical_bytes())
        return digest

    def get(self, payload_hash: bytes) -> HealthRecordPayload | None:
        """Payload for ``payload_hash`` or None."""
        path = self._path(payload_hash)
        if not path.exists():
            return None
        decoded = decode_payload(path.read_bytes())
        if isinstance(decoded, Failure):
            logger.warning("Unreadable payload", path=str(path), error=str(decoded.error))
            return None
        return decoded.value

    def delete(self, payload_hash: bytes) -> bool:
        """Remove a payload file."""
        with self._lock:
            path = self._path(payload_hash)
            if not path.exists():
                return False
            path.unlink()
            return True

    def __contains__(self, payload_hash: object) -> bool:
        """Whether a payload file exists."""
        return isinstance(payload_hash, bytes) and self._path(payload_hash).exists()

    def __len__(self) -> int:
        """Number of payload files."""
        return sum(1 for path in self._directory.iterdir() if path.is_file())
