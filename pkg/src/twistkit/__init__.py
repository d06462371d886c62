"""Twisted products of monoids, diagram monoids and a finite-semigroup engine."""

__version__ = "0.1.0"
