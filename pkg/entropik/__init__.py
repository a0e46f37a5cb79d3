"""Entropy-principle exploitation for systems of balance equations."""

__version__ = "0.3.0"
