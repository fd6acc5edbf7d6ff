"""Settings for running the nodal API from a working copy."""

import os

from .base import *

# The read API holds no sessions or signed cookies; the key only satisfies Django.
SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "consentchain-dev-only")

DEBUG = True

ALLOWED_HOSTS = ["localhost", "127.0.0.1", "[::1]"]

REST_FRAMEWORK["DEFAULT_RENDERER_CLASSES"] = [
    "rest_framework.renderers.JSONRenderer",
    "rest_framework.renderers.BrowsableAPIRenderer",
]

# structlog is configured by core.logging; Django must not install its own handlers.
LOGGING_CONFIG = None
