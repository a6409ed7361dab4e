"""Curvature of Hermitian bundles, total spaces and fiber families."""

__version__ = "0.1.0"
