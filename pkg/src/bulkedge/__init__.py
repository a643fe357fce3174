"""Numerical lab for bulk-edge index correspondence in tight-binding models."""

__version__ = "0.1.0"
