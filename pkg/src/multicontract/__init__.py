"""Multicontract - contraction-class certification and fixed-point search on finite metric spaces."""

__version__ = "0.1.0"
