"""Regularity-structures toolkit: symbolic front end and numerical back end."""

__version__ = "0.1.0"
