"""Theta lifts of quaternionic modular forms over Q, with exact coefficients
and a numerical check of the explicit Waldspurger formula."""

__version__ = "0.1.0"
