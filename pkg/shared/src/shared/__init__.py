"""Shared noise fields, networks, records and utilities for the periodic texture GAN toolkit."""

__version__ = "0.1.0"

# Export main modules (lazy imports keep torch out of light-weight consumers)
__all__ = [
    "checkpoint",
    "exceptions",
    "metrics",
    "models",
    "networks",
    "noise",
    "settings",
]
