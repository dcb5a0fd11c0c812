"""Exact character combinatorics for twisted affine Lie algebras."""

__version__ = "0.1.0"
