"""Test suite for roughmetrics."""
