"""Rings of differential operators on framed curves: exact computations."""

__version__ = "0.1.0"
