"""The ``consentchain`` operator command."""
