"""Core Django application configuration."""
