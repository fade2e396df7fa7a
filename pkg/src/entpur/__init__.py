"""Entanglement of purification estimates and correlation bounds for small bipartite states."""

__version__ = "0.1.0"
