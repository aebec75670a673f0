"""Polynomial identities for the quasi-Jordan product in associative dialgebras."""

__version__ = "0.1.0"
