"""Minimum t-spanning control sets for state lattices."""

__version__ = "0.1.0"
