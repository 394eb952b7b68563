"""Multiplier invariants of endomorphisms of projective space."""

__version__ = "0.1.0"
