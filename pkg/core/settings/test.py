"""Settings used by pytest-django."""

from .base import *

SECRET_KEY = "consentchain-test"  # noqa: S105

DEBUG = False

ALLOWED_HOSTS = ["testserver"]

LOGGING_CONFIG = None
