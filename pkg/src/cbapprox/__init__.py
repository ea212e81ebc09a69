"""Epsilon-approximating polytopes for convex bodies in dimensions 2 and 3."""

__version__ = "0.1.0"
