"""Subset-family upper bounds for p-Poincare constants and multi-way Cheeger constants of weighted graphs."""

__version__ = "0.1.0"
