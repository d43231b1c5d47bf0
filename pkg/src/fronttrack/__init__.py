"""Front tracking for hyperbolic balance laws with integrable sources."""

__version__ = "0.1.0"
