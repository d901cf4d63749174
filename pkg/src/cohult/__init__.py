"""Coherent filter systems over finite base sets and definable coherent ultrapowers."""

__version__ = "0.1.0"
