"""Desk-scale workbench for effective constructions from computable combinatorics."""

__version__ = "0.1.0"
