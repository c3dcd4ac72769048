"""levinson-check - numerical verification of Levinson's theorem for Bessel operators with complex boundary coupling."""

__version__ = "1.0.0"
