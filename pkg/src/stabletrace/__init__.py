"""Exact and desk-scale numerical checks of a stable trace formula toolkit for SL(2), A2 and GL(1) over F_p(t)."""

__version__ = "0.1.0"
