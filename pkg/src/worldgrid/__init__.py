"""Desk-scale federated grid testbed simulator."""

__version__ = "0.1.0"
