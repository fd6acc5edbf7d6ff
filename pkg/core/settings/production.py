"""
Settings for serving the nodal API behind a reverse proxy.

``DJANGO_SECRET_KEY`` and ``DJANGO_ALLOWED_HOSTS`` (comma separated) are
required. Log rendering follows ``CONSENTCHAIN_JSON_LOGS``.
"""

import os

from .base import *

SECRET_KEY = os.environ["DJANGO_SECRET_KEY"]

DEBUG = False

ALLOWED_HOSTS = [host for host in os.environ["DJANGO_ALLOWED_HOSTS"].split(",") if host]

SECURE_PROXY_SSL_HEADER = ("HTTP_X_FORWARDED_PROTO", "https")
SECURE_CONTENT_TYPE_NOSNIFF = True
SECURE_REFERRER_POLICY = "no-referrer"
X_FRAME_OPTIONS = "DENY"

# Only GET routes exist; refuse anything that tries to post a body.
DATA_UPLOAD_MAX_MEMORY_SIZE = 0

LOGGING_CONFIG = None
