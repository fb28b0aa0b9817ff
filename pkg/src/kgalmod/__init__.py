"""Galois-module structure of mod-p Milnor K-groups in cyclic towers."""

__version__ = "0.1.0"
