"""WSGI entry point for serving the nodal read API under gunicorn."""

import os

from django.core.wsgi import get_wsgi_application

from core.config import get_settings
from core.logging import configure_from_settings

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "core.settings.production")
configure_from_settings(get_settings())

application = get_wsgi_application()
