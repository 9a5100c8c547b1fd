"""Finite metric spaces: representation, validation, snowflaking and probes."""
