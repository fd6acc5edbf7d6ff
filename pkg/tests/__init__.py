"""Test suite for consentchain."""
