"""LegalProse purpose declarations."""

from services.legalprose.declaration import (
    canonical_bytes,
    check_field_subset,
    hash_declaration,
    parse_declaration,
    render_declaration,
)
from services.legalprose.lines import parse_key_values, split_list
from services.legalprose.types import DeclarationHash, PurposeDeclaration

__all__ = [
    "DeclarationHash",
    "PurposeDeclaration",
    "canonical_bytes",
    "check_field_subset",
    "hash_declaration",
    "parse_declaration",
    "parse_key_values",
    "render_declaration",
    "split_list",
]
