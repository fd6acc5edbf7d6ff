"""
URL configuration for consentchain.

The nodal read API lives under ``/api/v1/``; ``/health/`` reports whether the
served chain still verifies.
"""

from django.urls import include, path

urlpatterns = [
    path("api/v1/", include("apps.nodal.urls", namespace="nodal")),
    path("health/", include("core.health_urls")),
]
