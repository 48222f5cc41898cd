"""Exact pseudocharacters of classical groups over finite groups."""

__version__ = "0.1.0"
