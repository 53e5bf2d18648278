"""Real entropy of real quadratic rational maps."""

__version__ = "0.1.0"
