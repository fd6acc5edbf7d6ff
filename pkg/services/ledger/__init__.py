"""Blocks, world state and validation."""
