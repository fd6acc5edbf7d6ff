"""Nodal app configuration."""

from django.apps import AppConfig


class NodalConfig(AppConfig):
    """Configuration for the nodal read API."""

    name = "apps.nodal"
    verbose_name = "Nodal points"
