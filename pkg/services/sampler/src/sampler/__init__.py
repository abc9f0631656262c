"""Texture rendering from trained checkpoints."""

__version__ = "0.1.0"
