"""Read-only query surface over a committed ledger."""
