"""Coexistence analysis between active links and passive sensing above 100 GHz."""

__version__ = "0.1.0"
