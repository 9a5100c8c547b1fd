"""roughmetrics - small-rough-angle metric spaces and roughly self-contracting curves."""

__version__ = "0.1.0"
__author__ = "jnibarger01"
