"""Positive linear systems as phase-type distributions."""

__version__ = "1.0.0"
