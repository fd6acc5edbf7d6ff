"""
Signing scheme and identity digests.

The default scheme is a keyed hash, SHA-256(seed || message). It is NOT a
secure signature scheme: anyone holding the registry file can forge. It keeps
test vectors reproducible with any SHA-256 tool, and the ``SignatureScheme``
protocol lets a real scheme be plugged in.
"""

from __future__ import annotations

import hashlib
import hmac
from typing import Protocol, runtime_checkable

from services.identity.types import Credential

PUBLIC_TAG_DOMAIN = b"consentchain/public-tag\n"
PSEUDONYM_PREFIX = "pseudo:"


@runtime_checkable
class SignatureScheme(Protocol):
    """Interface every signing scheme implements."""

    def sign(self, seed: bytes, message: bytes) -> bytes:
        """Sign ``message`` with ``seed``."""
        ...

    def verify(self, seed: bytes, message: bytes, signature: bytes) -> bool:
        """Check ``signature`` over ``message`` for ``seed``."""
        ...


class KeyedHashScheme:
    """SHA-256(seed || message)."""

    def sign(self, seed: bytes, message: bytes) -> bytes:
        """Return the 32-byte keyed digest."""
        return hashlib.sha256(seed + message).digest()

    def verify(self, seed: bytes, message: bytes, signature: bytes) -> bool:
        """Compare in constant time against a fresh signature."""
        return hmac.compare_digest(self.sign(seed, message), signature)


DEFAULT_SCHEME = KeyedHashScheme()


def sign(credential: Credential, message: bytes) -> bytes:
    """Sign ``message`` with the default scheme."""
    return DEFAULT_SCHEME.sign(credential.seed, message)


def derive_public_tag(seed: bytes) -> bytes:
    """Derive the public tag published for a seed."""
    return hashlib.sha256(PUBLIC_TAG_DOMAIN + seed).digest()


def pseudonymize(salt: bytes, actor_id: str) -> bytes:
    """Return SHA-256(salt || actor_id)."""
    return hashlib.sha256(salt + actor_id.encode("utf-8")).digest()


def pseudonym_handle(salt: bytes, actor_id: str) -> str:
    """Return the on-chain handle of a data subject."""
    return PSEUDONYM_PREFIX + pseudonymize(salt, actor_id).hex()
