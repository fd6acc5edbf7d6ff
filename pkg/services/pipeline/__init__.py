"""Governed ingestion and reading of health records."""
