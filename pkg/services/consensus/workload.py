"""
Workload files.

One event per line: ``tick|actor|action|arg|arg...``. Blank lines and ``#``
comments are skipped. An ``@path`` argument names a declaration file relative
to the workload: ``consent.declare`` receives its text, every other action
receives its hash. Events keep file order within a tick.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from core.errors import ErrorCode, governance_error
from core.result import Failure, failure, success
from services.consensus.types import WorkloadEvent
from services.legalprose.declaration import hash_declaration, parse_declaration, render_declaration

if TYPE_CHECKING:
    from pathlib import Path

    from core.errors import GovernanceError
    from core.result import Outcome

DECLARE_ACTION = "consent.declare"
FILE_PREFIX = "@"


def _malformed(line: int, reason: str) -> Failure[GovernanceError]:
    return failure(governance_error(ErrorCode.MALFORMED_RECORD, f"workload line {line}: {reason}"))


def _resolve_file(arg: str, action: str, base_dir: Path | None, line: int) -> Outcome[str]:
    if base_dir is None:
        return _malformed(line, f"file reference {arg} needs a base directory")
    path = base_dir / arg.removeprefix(FILE_PREFIX)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        return _malformed(line, f"cannot read {path}: {exc.strerror}")
    parsed = parse_declaration(text)
    if isinstance(parsed, Failure):
        return parsed
    if action == DECLARE_ACTION:
        return success(render_declaration(parsed.value))
    return success(hash_declaration(parsed.value).hex())


def parse_workload(text: str, base_dir: Path | None = None) -> Outcome[list[WorkloadEvent]]:
    """
    Parse workload text into events ordered by tick.

    Returns:
        Result with the events, or MalformedRecord, or the declaration error of
        a referenced file.
    """
    events: list[WorkloadEvent] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [part.strip() for part in line.split("|")]
        if len(parts) < 3:
            return _malformed(lineno, "expected tick|actor|action")
        tick_text, actor, action, *args = parts
        if not (tick_text.isascii() and tick_text.isdigit()):
            return _malformed(lineno, f"tick must be a non-negative integer: {tick_text!r}")
        resolved: list[str] = []
        for arg in args:
            if arg.startswith(FILE_PREFIX):
                outcome = _resolve_file(arg, action, base_dir, lineno)
                if isinstance(outcome, Failure):
                    return outcome
                resolved.append(outcome.value)
            else:
                resolved.append(arg)
        events.append(
            WorkloadEvent(
                tick=int(tick_text), actor=actor, action=action, args=tuple(resolved), line=lineno
            )
        )
    events.sort(key=lambda event: event.tick)
    return success(events)


def load_workload(path: Path) -> Outcome[list[WorkloadEvent]]:
    """Read and parse a workload file; ``@`` references resolve next to it."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        return _malformed(0, f"cannot read {path}: {exc.strerror}")
    return parse_workload(text, path.parent)
