"""
The node served by this process.

``serve`` installs the node it opened; otherwise the first request opens one
from ``get_settings().paths``.
"""

from __future__ import annotations

import threading
from typing import TYPE_CHECKING

from core.config import get_settings
from core.result import Failure, success
from services.nodal.node import Node

if TYPE_CHECKING:
    from collections.abc import Callable

    from core.result import Outcome
    from services.nodal.service import NodalService

_lock = threading.Lock()
_node: Node | None = None
_clock: Callable[[], int] | None = None


def install_node(node: Node | None, clock: Callable[[], int] | None = None) -> None:
    """Serve ``node``; ``None`` drops it so the next request reopens from settings."""
    global _node, _clock  # noqa: PLW0603
    with _lock:
        _node = node
        _clock = clock


def current_node() -> Outcome[Node]:
    """Installed node, opened on first use."""
    global _node  # noqa: PLW0603
    with _lock:
        if _node is None:
            opened = Node.open(get_settings().paths)
            if isinstance(opened, Failure):
                return opened
            _node = opened.value
        return success(_node)


def current_service() -> Outcome[NodalService]:
    """Query service over the installed node."""
    node = current_node()
    if isinstance(node, Failure):
        return node
    return success(node.value.nodal_service(_clock))
