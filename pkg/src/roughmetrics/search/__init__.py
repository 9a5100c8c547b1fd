"""Exact maximum-cardinality SRA subset search."""
