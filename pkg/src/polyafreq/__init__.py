"""Polya frequency sequences, total positivity checks and growth estimators."""

__version__ = "0.1.0"
