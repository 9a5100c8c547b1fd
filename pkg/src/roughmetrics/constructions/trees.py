"""Metric trees, Hilbert-space sequences and the Heisenberg t-axis."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core.errors import DomainError
from ..core.models import ConstructionFamily, ConstructionSpec
from ..metric.analysis import snowflake
from ..metric.space import FiniteMetricSpace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TreePoint:
    """
    A point of the comb tree T_t.

    Segment 0 is the base segment C_0 = [0, t_1] with coord the abscissa;
    segment i >= 1 is the vertical segment C_i over t_i with coord the relative
    height y in [0, 1] (actual height y * t_i).
    """

    segment: int
    coord: float


def check_decreasing(t: Sequence[float]) -> np.ndarray:
    """Validate a strictly decreasing positive sequence."""
    array = np.asarray(t, dtype=np.float64)
    if array.ndim != 1 or array.size == 0:
        raise DomainError("Tree sequence must be a nonempty 1-D list")
    if np.any(array <= 0):
        raise DomainError("Tree sequence must be positive")
    if np.any(np.diff(array) >= 0):
        k = int(np.flatnonzero(np.diff(array) >= 0)[0]) + 1
        raise DomainError(f"Tree sequence must be strictly decreasing (fails at k={k})")
    return array


def tree_distance(t: np.ndarray, p: TreePoint, q: TreePoint) -> float:
    """Intrinsic distance in T_t; t is 0-based so segment i uses t[i - 1]."""
    if p.segment > q.segment:
        p, q = q, p
    if p.segment == q.segment:
        if p.segment == 0:
            return abs(p.coord - q.coord)
        return abs(p.coord - q.coord) * float(t[p.segment - 1])
    if p.segment == 0:
        t_q = float(t[q.segment - 1])
        return abs(p.coord - t_q) + q.coord * t_q
    t_p, t_q = float(t[p.segment - 1]), float(t[q.segment - 1])
    return p.coord * t_p + abs(t_p - t_q) + q.coord * t_q


def tree_points(t: np.ndarray, samples_per_segment: int) -> list[TreePoint]:
    """Evenly spaced samples: s + 1 on C_0, then s on each C_i (the foot is shared)."""
    s = samples_per_segment
    points = [TreePoint(0, k * float(t[0]) / s) for k in range(s + 1)]
    for i in range(1, t.size + 1):
        points.extend(TreePoint(i, k / s) for k in range(1, s + 1))
    return points


def metric_tree(
    t: Sequence[float],
    samples_per_segment: int = 1,
    points: Optional[Sequence[TreePoint | Sequence[float]]] = None,
) -> FiniteMetricSpace:
    """
    Sampled comb tree T_t with its intrinsic metric.

    The apexes p_i = (C_i, 1) form an ultrametric set with d(p_i, p_j) = 2 t_min(i,j).
    Their indices are kept in ``metadata["apex_indices"]``.

    Args:
        t: Strictly decreasing positive heights t_1 > t_2 > ...
        samples_per_segment: Samples per segment when points are not given
        points: Explicit tree points (or segment, coord pairs) overriding the sampling
    """
    heights = check_decreasing(t)
    if points is None:
        if samples_per_segment < 1:
            raise DomainError("Need at least one sample per segment")
        chosen = tree_points(heights, samples_per_segment)
    else:
        chosen = [
            p if isinstance(p, TreePoint) else TreePoint(int(p[0]), float(p[1])) for p in points
        ]
        for point in chosen:
            if not 0 <= point.segment <= heights.size:
                raise DomainError(f"Tree point on unknown segment {point.segment}")
    if len(set(chosen)) != len(chosen):
        raise DomainError("Tree points must be distinct")

    n = len(chosen)
    matrix = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            matrix[a, b] = matrix[b, a] = tree_distance(heights, chosen[a], chosen[b])

    params: dict[str, object] = {
        "t": heights.tolist(),
        "samples_per_segment": samples_per_segment,
    }
    if points is not None:
        params["points"] = [[p.segment, p.coord] for p in chosen]

    apex = [i for i, p in enumerate(chosen) if p.segment >= 1 and p.coord == 1.0]
    labels = [f"C{p.segment}:{p.coord:.17g}" for p in chosen]
    return FiniteMetricSpace.from_matrix(
        matrix,
        labels=labels,
        name=f"metric_tree(levels={heights.size})",
        construction=ConstructionSpec(family=ConstructionFamily.METRIC_TREE, params=params),
        metadata={"apex_indices": apex, "tree_points": chosen, "t": heights},
    )


def apex_set(t: Sequence[float]) -> FiniteMetricSpace:
    """Only the apexes p_1, p_2, ... of T_t."""
    heights = check_decreasing(t)
    return metric_tree(heights, points=[TreePoint(i, 1.0) for i in range(1, heights.size + 1)])


def hilbert_sequence(c: Optional[Sequence[float]] = None, count: int = 20) -> FiniteMetricSpace:
    """
    Points c_k e_k of Hilbert space: d(x_k, x_l) = sqrt(c_k**2 + c_l**2).

    Args:
        c: Strictly decreasing positive weights (defaults to 1/k)
        count: Number of points taken from c
    """
    if count < 2:
        raise DomainError(f"Need at least two points, got {count}")
    weights = np.asarray(
        c if c is not None else 1.0 / np.arange(1, count + 1), dtype=np.float64
    )[:count]
    if weights.size < count:
        raise DomainError(f"Only {weights.size} weights given for {count} points")
    check_decreasing(weights)

    matrix = np.sqrt(weights[:, None] ** 2 + weights[None, :] ** 2)
    np.fill_diagonal(matrix, 0.0)
    return FiniteMetricSpace.from_matrix(
        matrix,
        labels=[f"x{k}" for k in range(1, count + 1)],
        name=f"hilbert_sequence(count={count})",
        construction=ConstructionSpec(
            family=ConstructionFamily.HILBERT_SEQUENCE,
            params={"c": weights.tolist(), "count": count},
        ),
    )


def heisenberg_axis(ts: Sequence[float], c: float = 1.0) -> FiniteMetricSpace:
    """
    Sample of the t-axis of the Heisenberg group: d = c |s - t|**(1/2).

    Raises:
        DomainError: On duplicate parameters or a nonpositive scale
    """
    values = np.asarray(ts, dtype=np.float64)
    if c <= 0:
        raise DomainError(f"Scale must be positive, got {c}")
    if np.unique(values).size != values.size:
        raise DomainError("Heisenberg axis parameters must be distinct")

    line = FiniteMetricSpace.from_coords(c * c * values, labels=[f"t={v:.17g}" for v in values])
    flake = snowflake(line, 0.5)
    flake.name = f"heisenberg_axis(n={values.size}, c={c:g})"
    flake.construction = ConstructionSpec(
        family=ConstructionFamily.HEISENBERG_AXIS, params={"ts": values.tolist(), "c": c}
    )
    return flake
