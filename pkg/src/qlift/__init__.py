"""Lifting partial semigroups and quantales to quantales of power series."""

__version__ = "0.1.0"
