#!/usr/bin/env python
"""Django management entry point for the nodal read API.

Node operations live in the ``consentchain`` command; this script is for
Django's own commands (``check``, ``runserver``) during development.
"""

import os
import sys
from pathlib import Path

from dotenv import load_dotenv

# CONSENTCHAIN_* variables in .env must be visible before settings import.
load_dotenv(Path(__file__).resolve().parent / ".env")

from django.core.management import execute_from_command_line  # noqa: E402

from core.config import get_settings  # noqa: E402
from core.logging import configure_from_settings  # noqa: E402


def main() -> None:
    """Configure logging from the node settings and run a Django command."""
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "core.settings.development")
    configure_from_settings(get_settings())
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
