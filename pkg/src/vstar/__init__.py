"""Visibly pushdown grammar inference from membership queries and seed strings."""
__version__ = "0.1.0"
