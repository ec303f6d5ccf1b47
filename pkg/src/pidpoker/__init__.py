"""Partial information decomposition of heads-up poker behavior."""

__version__ = "0.1.0"
