"""Exact Lie algebra toolkit for building semidirect products and certifying negative Ricci metrics."""

__version__ = "0.1.0"
