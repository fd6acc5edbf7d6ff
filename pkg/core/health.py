"""Liveness report for the served node."""

from __future__ import annotations

from typing import TYPE_CHECKING

from django.http import JsonResponse

from apps.nodal.runtime import current_node
from core.result import Failure

if TYPE_CHECKING:
    from django.http import HttpRequest

    from services.nodal.node import Node

Check = dict[str, object]


def health_check(_request: HttpRequest) -> JsonResponse:
    """
    Report chain verification and off-chain store status.

    Returns:
        JsonResponse with one entry per check; 503 unless every check is healthy.
    """
    node = current_node()
    if isinstance(node, Failure):
        unavailable: Check = {"status": "unhealthy", "error": str(node.error)}
        checks = {"ledger": unavailable, "offchain": unavailable}
    else:
        checks = {"ledger": _check_ledger(node.value), "offchain": _check_offchain(node.value)}

    healthy = all(check["status"] == "healthy" for check in checks.values())
    return JsonResponse(
        {"status": "healthy" if healthy else "degraded", "checks": checks},
        status=200 if healthy else 503,
    )


def _check_ledger(node: Node) -> Check:
    verdict = node.ledger.verify()
    if not verdict.ok:
        return {
            "status": "unhealthy",
            "first_bad_height": verdict.first_bad_height,
            "error": verdict.reason,
        }
    return {"status": "healthy", "height": node.ledger.height}


def _check_offchain(node: Node) -> Check:
    directory = node.paths.offchain_path
    if not directory.is_dir():
        return {"status": "unhealthy", "error": f"missing payload directory {directory}"}
    return {"status": "healthy", "payloads": len(node.pipeline.store)}
