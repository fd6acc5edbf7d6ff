"""
Django settings shared by every environment.

Django only fronts the nodal read API. Chain, world state and off-chain
payloads live in files under ``CONSENTCHAIN_PATH_DATA_DIR`` and are opened
by ``apps.nodal.runtime``, so there is no database and no user model.
"""

from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent.parent

# contenttypes and auth are needed by DRF's request machinery even without users.
INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    "rest_framework",
    "apps.nodal",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.middleware.common.CommonMiddleware",
]

ROOT_URLCONF = "core.urls"
WSGI_APPLICATION = "core.wsgi.application"
ASGI_APPLICATION = "core.asgi.application"

DATABASES: dict[str, dict[str, str]] = {}

# Block and consent timestamps are logical integers; wall-clock zones never reach the chain.
TIME_ZONE = "UTC"
USE_TZ = True
USE_I18N = False

# Route keys such as state/<key> end without a slash.
APPEND_SLASH = False

# Readers identify themselves with the X-Consentchain-Actor header, checked by the nodal
# service against the registry, so DRF authentication stays off.
REST_FRAMEWORK = {
    "DEFAULT_AUTHENTICATION_CLASSES": [],
    "DEFAULT_PERMISSION_CLASSES": [],
    "UNAUTHENTICATED_USER": None,
    "DEFAULT_RENDERER_CLASSES": ["rest_framework.renderers.JSONRenderer"],
}
