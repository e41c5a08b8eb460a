"""Isogeny craters with level structure: brute-force construction and ideal-theoretic prediction."""

__version__ = "0.1.0"
