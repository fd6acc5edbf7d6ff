"""ASGI entry point for the nodal read API."""

import os

from django.core.asgi import get_asgi_application

from core.config import get_settings
from core.logging import configure_from_settings

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "core.settings.production")
configure_from_settings(get_settings())

application = get_asgi_application()
