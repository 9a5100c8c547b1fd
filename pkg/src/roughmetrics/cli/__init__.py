"""CLI interface components."""
