"""Finite combinatorics of Fraisse classes: embeddings, thick families,
patterns, extension lemmas, linear-order agreement and closure operators."""

__version__ = "0.1.0"
