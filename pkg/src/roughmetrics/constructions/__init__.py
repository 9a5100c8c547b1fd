"""Builders for the example families of SRA spaces."""
