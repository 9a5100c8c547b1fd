"""Hypothesis strategies for random finite metric spaces."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from roughmetrics.metric.space import FiniteMetricSpace


@st.composite
def point_clouds(draw, min_points: int = 3, max_points: int = 9, dim: int = 3):
    """Random Euclidean point clouds; normal samples are distinct almost surely."""
    n = draw(st.integers(min_value=min_points, max_value=max_points))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    return FiniteMetricSpace.from_coords(rng.normal(size=(n, dim)))


@st.composite
def dendrogram_ultrametrics(draw, min_points: int = 3, max_points: int = 10):
    """Random ultrametrics: distance is the merge height of a random agglomeration."""
    n = draw(st.integers(min_value=min_points, max_value=max_points))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = np.random.default_rng(seed)
    clusters = [[i] for i in range(n)]
    d = np.zeros((n, n))
    height = 0.0
    while len(clusters) > 1:
        height += float(rng.uniform(0.1, 1.0))
        a, b = sorted(int(v) for v in rng.choice(len(clusters), size=2, replace=False))
        for x in clusters[a]:
            for y in clusters[b]:
                d[x, y] = d[y, x] = height
        clusters[a] = clusters[a] + clusters.pop(b)
    return FiniteMetricSpace.from_matrix(d)
