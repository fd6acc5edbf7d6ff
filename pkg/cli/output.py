"""Rendering of command results."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, TextIO

if TYPE_CHECKING:
    from core.errors import GovernanceError

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2


@dataclass(frozen=True, slots=True)
class CommandOutput:
    """
    What a command prints.

    ``data`` is the JSON form; ``text`` is the human form. ``ok`` is False when
    the command completed but its outcome is a rejection (an invalid
    transaction, a broken chain).
    """

    data: Any
    text: list[str] = field(default_factory=list)
    ok: bool = True


def dumps(data: Any) -> str:
    """Stable JSON for stdout."""
    return json.dumps(data, sort_keys=True, ensure_ascii=False)


def emit(output: CommandOutput, *, as_json: bool, stream: TextIO | None = None) -> int:
    """Print ``output`` and return its exit code."""
    out = stream or sys.stdout
    if as_json:
        out.write(dumps(output.data) + "\n")
    else:
        for line in output.text:
            out.write(line + "\n")
    return EXIT_OK if output.ok else EXIT_REJECTED


def emit_error(
    error: GovernanceError,
    *,
    as_json: bool,
    stream: TextIO | None = None,
    code: int = EXIT_REJECTED,
) -> int:
    """Print a rejection and return ``code``."""
    out = stream or sys.stdout
    if as_json:
        out.write(dumps(error.to_dict()) + "\n")
    else:
        out.write(f"{error.name}: {error.message}\n")
    return code
