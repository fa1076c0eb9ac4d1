"""Verification of token-passing systems over parameterized topologies."""

__version__ = "0.1.0"
