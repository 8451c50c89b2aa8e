"""Rational equivariant Moore spaces over products of free groups."""

__version__ = "0.1.0"
