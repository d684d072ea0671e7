"""Exact workbench for Picard-Vessiot and Galois-hull Lie algebra comparisons."""

__version__ = "0.1.0"
