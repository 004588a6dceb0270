"""Witness-index transformation of array programs for bounded model checking."""

__version__ = "0.1.0"
