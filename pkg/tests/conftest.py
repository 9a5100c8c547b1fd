"""Shared fixtures."""

from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

from roughmetrics.core.config import get_settings, use_config_file
from roughmetrics.metric.space import FiniteMetricSpace

settings.register_profile(
    "roughmetrics",
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture, HealthCheck.too_slow],
)
settings.load_profile("roughmetrics")


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Isolate every test from ROUGHMETRICS_* variables and config files of earlier runs."""
    for key in list(os.environ):
        if key.startswith("ROUGHMETRICS_"):
            monkeypatch.delenv(key, raising=False)
    use_config_file(None)
    yield
    use_config_file(None)


@pytest.fixture
def line3():
    """Collinear points 0, 1, 2 on the real line."""
    return FiniteMetricSpace.from_coords([0.0, 1.0, 2.0], name="line3")


@pytest.fixture
def equilateral():
    """Three points at mutual distance 1."""
    return FiniteMetricSpace.from_matrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]], name="equilateral")


@pytest.fixture
def isosceles_ultra():
    """Ultrametric triple with sides (2, 2, 1)."""
    return FiniteMetricSpace.from_matrix([[0, 2, 2], [2, 0, 1], [2, 1, 0]], name="ultra")
