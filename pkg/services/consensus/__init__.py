"""Ordering service, peers and the network simulator."""
