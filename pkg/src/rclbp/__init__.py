"""Noise-robust CLBP texture features for surface defect classification."""

__version__ = "0.1.0"
