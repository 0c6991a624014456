"""Curvature geometry of unit tangent bundles with the standard contact metric structure."""

__version__ = "0.1.0"
