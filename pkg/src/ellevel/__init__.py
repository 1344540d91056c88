"""Exact series engine for elliptic functions of level 2, 3 and 4."""

from .algebra import MultiPoly, Rat, SYMBOLS, const, rat, sym

__all__ = ["MultiPoly", "Rat", "SYMBOLS", "const", "rat", "sym"]
