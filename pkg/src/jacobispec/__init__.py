"""Spectral calculus for the Jacobi trigonometric system on (0, pi)."""

__version__ = "0.1.0"
