"""
Registry bootstrap file.

One record per line, UTF-8::

    actor_id|org_id_or_-|role[,role...]|seed_hex

An empty role column marks an organization record. Blank lines and lines
starting with ``#`` are skipped. A trailing ``|inactive`` column records a
deactivation.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from core.errors import ErrorCode, GovernanceError, governance_error
from core.result import Failure, failure, success
from services.identity.registry import ActorRegistry
from services.identity.types import SEED_SIZE, Actor, Credential, Role

if TYPE_CHECKING:
    from pathlib import Path

    from core.result import Outcome

INACTIVE_MARK = "inactive"


def format_line(actor: Actor, credential: Credential) -> str:
    """Render one registry line (without newline)."""
    roles = ",".join(sorted(role.value for role in actor.roles))
    parts = [actor.actor_id, actor.org_id or "-", roles, credential.seed.hex()]
    if not actor.active:
        parts.append(INACTIVE_MARK)
    return "|".join(parts)


def _malformed(lineno: int, reason: str) -> GovernanceError:
    return governance_error(ErrorCode.MALFORMED_RECORD, f"registry line {lineno}: {reason}")


def parse_registry(text: str, salt: bytes) -> Outcome[ActorRegistry]:
    """
    Build a registry from bootstrap text.

    Args:
        text: Bootstrap file contents.
        salt: Network salt.

    Returns:
        Result with the populated registry, or the first registration error.
    """
    registry = ActorRegistry(salt=salt)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) not in (4, 5):
            return failure(_malformed(lineno, "expected 4 or 5 columns"))
        actor_id, org_col, roles_col, seed_hex = parts[:4]
        try:
            seed = bytes.fromhex(seed_hex)
        except ValueError:
            return failure(_malformed(lineno, "seed is not hex"))
        if len(seed) != SEED_SIZE:
            return failure(_malformed(lineno, f"seed must be {SEED_SIZE} bytes"))
        try:
            roles = [Role(name) for name in roles_col.split(",") if name]
        except ValueError:
            return failure(_malformed(lineno, f"unknown role in {roles_col!r}"))
        org_id = None if org_col == "-" else org_col

        if roles:
            result = registry.register_actor(actor_id, org_id, roles, seed)
        else:
            result = registry.register_organization(actor_id, seed)
        if isinstance(result, Failure):
            return result
        if len(parts) == 5:
            if parts[4] != INACTIVE_MARK:
                return failure(_malformed(lineno, f"unknown flag {parts[4]!r}"))
            registry.deactivate(actor_id)
    return success(registry)


def load_registry(path: Path, salt: bytes) -> Outcome[ActorRegistry]:
    """Load the registry file, treating a missing file as empty."""
    text = path.read_text(encoding="utf-8") if path.exists() else ""
    return parse_registry(text, salt)


def dump_registry(registry: ActorRegistry) -> str:
    """Render the current registry as bootstrap text."""
    lines = []
    for actor in registry:
        credential = registry.credential(actor.actor_id)
        if credential is not None:
            lines.append(format_line(actor, credential))
    return "".join(f"{line}\n" for line in lines)


def save_registry(path: Path, registry: ActorRegistry) -> None:
    """Rewrite the registry file from the in-memory registry."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_registry(registry), encoding="utf-8")
