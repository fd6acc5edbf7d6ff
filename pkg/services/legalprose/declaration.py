"""Parse, render, hash and check purpose declarations."""

from __future__ import annotations

import hashlib
from typing import TYPE_CHECKING

from core.errors import ErrorCode, governance_error, missing_key
from core.result import Failure, failure, success
from services.legalprose.lines import parse_key_values, split_list
from services.legalprose.types import (
    DECLARATION_KEYS,
    FIELD_NAME,
    DeclarationHash,
    PurposeDeclaration,
)

if TYPE_CHECKING:
    from collections.abc import Iterable

    from core.result import Outcome


def parse_declaration(text: str) -> Outcome[PurposeDeclaration]:
    """
    Parse a ``.lprose`` document.

    Args:
        text: Declaration text with the keys id, controller, processors,
            purpose, fields, retention_days, scenario.

    Returns:
        Result with the declaration, or MissingKey, EmptyFields, BadRetention,
        UnknownKey, DuplicateKey, BadFieldName.
    """
    parsed = parse_key_values(text, DECLARATION_KEYS, DECLARATION_KEYS)
    if isinstance(parsed, Failure):
        return parsed
    values = parsed.value

    for key in ("id", "controller", "purpose"):
        if not values[key]:
            return failure(missing_key(key))

    fields = list(dict.fromkeys(split_list(values["fields"])))
    if not fields:
        return failure(governance_error(ErrorCode.EMPTY_FIELDS, "fields cannot be empty"))
    bad = [name for name in fields if not FIELD_NAME.fullmatch(name)]
    if bad:
        return failure(
            governance_error(ErrorCode.BAD_FIELD_NAME, f"invalid field names: {bad}", bad)
        )

    raw_retention = values["retention_days"]
    if not (raw_retention.isascii() and raw_retention.isdigit()) or int(raw_retention) < 1:
        return failure(
            governance_error(
                ErrorCode.BAD_RETENTION,
                f"retention_days must be a positive integer, got {raw_retention!r}",
            )
        )

    return success(
        PurposeDeclaration(
            declaration_id=values["id"],
            controller=values["controller"],
            processors=tuple(split_list(values["processors"])),
            purpose_text=values["purpose"],
            allowed_fields=tuple(fields),
            retention_days=int(raw_retention),
            scenario=values["scenario"],
        )
    )


def render_declaration(declaration: PurposeDeclaration) -> str:
    """Render the canonical form; its UTF-8 bytes are what gets hashed."""
    values = (
        declaration.declaration_id,
        declaration.controller,
        ",".join(declaration.processors),
        declaration.purpose_text,
        ",".join(sorted(declaration.allowed_fields)),
        str(declaration.retention_days),
        declaration.scenario,
    )
    return "".join(f"{key}:{value}\n" for key, value in zip(DECLARATION_KEYS, values, strict=True))


def canonical_bytes(declaration: PurposeDeclaration) -> bytes:
    """Canonical bytes of a declaration."""
    return render_declaration(declaration).encode("utf-8")


def hash_declaration(declaration: PurposeDeclaration) -> DeclarationHash:
    """Return the SHA-256 digest of the canonical form."""
    return hashlib.sha256(canonical_bytes(declaration)).digest()


def check_field_subset(
    declaration: PurposeDeclaration,
    submitted_field_names: Iterable[str],
) -> list[str]:
    """
    Data minimization check.

    Returns:
        Submitted field names not allowed by the declaration, in submission
        order without repeats. Empty means the submission is acceptable.
    """
    allowed = declaration.field_set
    return [name for name in dict.fromkeys(submitted_field_names) if name not in allowed]
