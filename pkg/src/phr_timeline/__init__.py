"""Claims timeline application over a sandboxed national health record stack."""

__version__ = "0.1.0"
