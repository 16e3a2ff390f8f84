"""Quantum homology testing for loops on triangulated closed surfaces."""

__version__ = "0.1.0"
