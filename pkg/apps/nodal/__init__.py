"""Nodal-point read API over HTTP."""
