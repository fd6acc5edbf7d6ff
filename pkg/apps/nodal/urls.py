"""URL configuration for the nodal read API."""

from django.urls import path, re_path

from apps.nodal.views import NodalQueryView

app_name = "nodal"

urlpatterns = [
    path("", NodalQueryView.as_view(), name="root"),
    re_path(r"^(?P<endpoint>.+)$", NodalQueryView.as_view(), name="query"),
]
