"""Built-in contracts: simulation and endorsement."""
