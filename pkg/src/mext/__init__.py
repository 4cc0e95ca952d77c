"""Minimal non-degenerate extensions of Rep(A, t)."""
