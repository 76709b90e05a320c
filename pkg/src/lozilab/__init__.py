"""Exact-arithmetic toolkit for the Lozi family: manifolds, trapping
polygons, accumulation-set approximation, and parameter classification."""

__version__ = "0.1.0"
