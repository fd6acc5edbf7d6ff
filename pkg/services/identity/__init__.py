"""Membership registry, roles and signing."""

from services.identity.bootstrap import load_registry, parse_registry, save_registry
from services.identity.registry import ActorRegistry, register_actor, verify
from services.identity.signing import (
    KeyedHashScheme,
    SignatureScheme,
    pseudonym_handle,
    pseudonymize,
    sign,
)
from services.identity.types import Actor, Credential, Role

__all__ = [
    "Actor",
    "ActorRegistry",
    "Credential",
    "KeyedHashScheme",
    "Role",
    "SignatureScheme",
    "load_registry",
    "parse_registry",
    "pseudonym_handle",
    "pseudonymize",
    "register_actor",
    "save_registry",
    "sign",
    "verify",
]
