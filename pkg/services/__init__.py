"""Domain services: identity, consent, contracts, ledger, consensus, pipeline and nodal queries."""
