"""Weak quantum theory toolkit: finite observable monoids, proposition lattices, matrix *-algebras and information dynamics."""

__version__ = "0.1.0"
