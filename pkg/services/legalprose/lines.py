"""Line-oriented ``key: value`` parsing shared by declarations and network configs."""

from __future__ import annotations

from typing import TYPE_CHECKING

from core.errors import ErrorCode, duplicate_key, governance_error, missing_key, unknown_key
from core.result import failure, success

if TYPE_CHECKING:
    from collections.abc import Collection, Iterable

    from core.result import Outcome


def parse_key_values(
    text: str,
    allowed: Collection[str],
    required: Iterable[str] = (),
) -> Outcome[dict[str, str]]:
    """
    Parse ``key: value`` lines.

    Keys are matched exactly; values are stripped. Blank lines and ``#``
    comments are skipped. Order of lines does not matter.

    Args:
        text: Document text.
        allowed: Keys the document may contain.
        required: Keys that must be present, reported in this order when missing.

    Returns:
        Result with the key/value mapping, or UnknownKey, DuplicateKey,
        MissingKey, MalformedRecord.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            return failure(
                governance_error(ErrorCode.MALFORMED_RECORD, f"line {lineno}: expected key: value")
            )
        key = key.strip()
        if key not in allowed:
            return failure(unknown_key(key))
        if key in values:
            return failure(duplicate_key(key))
        values[key] = value.strip()
    for key in required:
        if key not in values:
            return failure(missing_key(key))
    return success(values)


def split_list(value: str) -> list[str]:
    """Split a comma-separated value, dropping empty items."""
    return [item.strip() for item in value.split(",") if item.strip()]
