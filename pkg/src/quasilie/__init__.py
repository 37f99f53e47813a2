"""Quasi-Lie schemes: exact bracket algebra, generalised flows and numeric checks."""

__version__ = "0.1.0"
