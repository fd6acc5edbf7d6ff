"""Read-only HTTP views over the nodal query service."""

from __future__ import annotations

from rest_framework import status
from rest_framework.request import Request
from rest_framework.response import Response
from rest_framework.views import APIView

from apps.nodal.runtime import current_service
from apps.nodal.serializers import QueryResponseSerializer
from core.errors import ErrorCode
from core.logging import get_logger
from core.result import Failure
from services.nodal.types import QueryRequest

logger = get_logger(__name__)

ACTOR_HEADER = "X-Consentchain-Actor"


class NodalQueryView(APIView):
    """
    Every nodal route behind one view.

    The path after the API prefix is handed to ``NodalService.handle_query``
    together with the query string and the ``X-Consentchain-Actor`` header.
    """

    authentication_classes = []
    permission_classes = []

    def get(self, request: Request, endpoint: str = "") -> Response:
        """Answer a read query."""
        service = current_service()
        if isinstance(service, Failure):
            logger.error("Node unavailable", error=str(service.error))
            return Response(
                {"ok": False, "error": service.error.name, "message": service.error.message},
                status=status.HTTP_503_SERVICE_UNAVAILABLE,
            )
        answer = service.value.handle_query(
            QueryRequest(
                endpoint=endpoint,
                params=request.query_params.dict(),
                actor=request.headers.get(ACTOR_HEADER) or None,
            )
        )
        serializer = QueryResponseSerializer(data=answer.to_dict())
        if not serializer.is_valid():
            logger.error("Malformed nodal answer", endpoint=endpoint, errors=serializer.errors)
            return Response(
                {
                    "ok": False,
                    "error": ErrorCode.MALFORMED_RECORD.value,
                    "message": f"answer for {endpoint} failed its envelope check",
                },
                status=status.HTTP_500_INTERNAL_SERVER_ERROR,
            )
        return Response(serializer.data, status=answer.status_code)
