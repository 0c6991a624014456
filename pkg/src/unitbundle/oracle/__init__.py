"""Finite-difference reference implementation used to cross-check the closed forms."""
