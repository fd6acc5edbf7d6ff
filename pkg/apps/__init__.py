"""Django applications package."""
