"""Response envelope for nodal queries."""

from __future__ import annotations

from rest_framework import serializers


class QueryResponseSerializer(serializers.Serializer):
    """Envelope of every nodal answer."""

    ok = serializers.BooleanField()
    payload = serializers.JSONField(required=False, allow_null=True)
    error = serializers.CharField(required=False)
    message = serializers.CharField(required=False, allow_blank=True)
