"""
Families that separate SRA from nearby notions.

- no_converse_family: SRA(beta) triangles whose power metrics d**q all fail.
- dyadic_doubling_space: doubling, neither SRA free nor SRA full.
- hilbert_triangles: an SRA(alpha) subset of Hilbert space with the same failure.
- simplex_with_center: a regular simplex plus its center.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from typing import Optional

import numpy as np

from ..core.errors import DomainError
from ..core.models import ConstructionFamily, ConstructionSpec
from ..metric.space import FiniteMetricSpace

logger = logging.getLogger(__name__)

CROSS_TRIANGLE_DISTANCE = 2.0


def _check_deltas(deltas: Sequence[float], count: int) -> np.ndarray:
    values = np.asarray(deltas, dtype=np.float64)
    if values.size < count:
        raise DomainError(f"Need {count} deltas, got {values.size}")
    values = values[:count]
    if np.any(values <= 0) or np.any(values > 1):
        raise DomainError("Deltas must lie in (0, 1]")
    if np.any(np.diff(values) > 0):
        raise DomainError("Deltas must be nonincreasing")
    return values


def no_converse_family(
    beta: float, deltas: Sequence[float], m_count: int
) -> FiniteMetricSpace:
    """
    Triangles with sides (1, delta_m, 1 + beta delta_m), pairwise 2 apart.

    Point x_m, y_m, z_m has d(x, y) = 1, d(x, z) = delta_m and
    d(y, z) = 1 + beta delta_m. The space satisfies SRA(beta).

    Raises:
        DomainError: If beta is outside (0, 1) or the deltas are not nonincreasing
    """
    if not 0 < beta < 1:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    if m_count < 1:
        raise DomainError("Need at least one triangle")
    values = _check_deltas(deltas, m_count)

    n = 3 * m_count
    matrix = np.full((n, n), CROSS_TRIANGLE_DISTANCE)
    labels: list[str] = []
    for m, delta in enumerate(values):
        x, y, z = 3 * m, 3 * m + 1, 3 * m + 2
        block = np.array(
            [[0.0, 1.0, delta], [1.0, 0.0, 1.0 + beta * delta], [delta, 1.0 + beta * delta, 0.0]]
        )
        matrix[x : z + 1, x : z + 1] = block
        labels.extend(f"{name}{m + 1}" for name in "xyz")

    return FiniteMetricSpace.from_matrix(
        matrix,
        labels=labels,
        name=f"no_converse(beta={beta:g}, m={m_count})",
        construction=ConstructionSpec(
            family=ConstructionFamily.NO_CONVERSE,
            params={"beta": beta, "deltas": values.tolist(), "m_count": m_count},
        ),
    )


def first_power_violation(beta: float, deltas: Sequence[float], q: float) -> Optional[int]:
    """
    First 1-based m with (1 + beta delta_m)**q > 1 + delta_m**q, or None.

    At such m the triangle (x_m, y_m, z_m) breaks the triangle inequality for d**q.
    """
    if q <= 1:
        raise DomainError(f"Power must exceed 1, got {q}")
    for m, delta in enumerate(deltas, start=1):
        if q * math.log1p(beta * delta) > math.log1p(delta**q):
            return m
    return None


# ------------------------------------------------------------------ dyadic


def dyadic_distance(x: float, m: int, y: float, n: int) -> float:
    """
    Distance between (x, m) and (y, n) in [0, 1) x N.

    Across levels it is |m - n|. Within level n it is |x - y| when both points
    share a dyadic interval of length 2**-n, else the dyadic ultrametric.
    """
    if m != n:
        return float(abs(m - n))
    if x == y:
        return 0.0
    j = 0
    while math.floor(x * 2 ** (j + 1)) == math.floor(y * 2 ** (j + 1)):
        j += 1
    if j >= n:
        return abs(x - y)
    return 2.0**-j


def dyadic_doubling_space(levels: Sequence[int], resolution: int) -> FiniteMetricSpace:
    """
    Grid {k / resolution} x levels with the dyadic level metric.

    Raises:
        DomainError: If resolution is not a power of two or levels repeat
    """
    if resolution < 1 or resolution & (resolution - 1):
        raise DomainError(f"Resolution must be a power of two, got {resolution}")
    if len(set(levels)) != len(levels) or any(level < 1 for level in levels):
        raise DomainError("Levels must be distinct positive integers")

    points = [(k / resolution, int(level)) for level in levels for k in range(resolution)]
    n = len(points)
    matrix = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            (x, m), (y, level) = points[a], points[b]
            matrix[a, b] = matrix[b, a] = dyadic_distance(x, m, y, level)

    return FiniteMetricSpace.from_matrix(
        matrix,
        labels=[f"({x:.17g},{m})" for x, m in points],
        name=f"dyadic_doubling(levels={list(levels)}, resolution={resolution})",
        construction=ConstructionSpec(
            family=ConstructionFamily.DYADIC_DOUBLING,
            params={"levels": [int(v) for v in levels], "resolution": resolution},
        ),
        metadata={"points": points},
    )


# ------------------------------------------------------- hilbert triangles


def restriction_bounds(alpha: float) -> list[float]:
    """Five lower bounds on R for the triangle family; r_min is their maximum."""
    if not 1 / math.sqrt(2.0) < alpha < 1:
        raise DomainError(f"alpha must lie in (1/sqrt 2, 1), got {alpha}")
    a2 = alpha * alpha
    return [
        1.0 + 2.0 / alpha,
        1.0 + 1.0 / math.sqrt(2.0),
        1.0 + math.sqrt(1.0 + 1.0 / (8.0 * a2)),
        (4.0 * a2 + 1.0 + alpha * math.sqrt(16.0 * a2 + 10.0)) / (4.0 * a2 - 2.0),
        (2.0 * a2 + 1.0 + alpha * math.sqrt(4.0 * a2 + 6.0)) / (2.0 * a2 - 1.0),
    ]


def r_min(alpha: float) -> float:
    """Smallest admissible R for hilbert_triangles."""
    return max(restriction_bounds(alpha))


def hilbert_triangles(
    alpha: float, R: float, m_count: int, deltas: Sequence[float]
) -> FiniteMetricSpace:
    """
    Triangles x_m, y_m, z_m in span{e_(2m-1), e_(2m)} of Hilbert space.

    x_m = R e_(2m-1), y_m = x_m + e_(2m) and z_m = x_m + delta_m w_m, where the
    unit vector w_m makes the sides (1, delta_m, 1 + alpha delta_m). The set
    satisfies SRA(alpha) for R >= r_min(alpha).

    Raises:
        DomainError: If alpha <= 1/sqrt 2, R < r_min(alpha) or the deltas are invalid
    """
    bound = r_min(alpha)
    if R < bound:
        raise DomainError(f"R must be at least r_min({alpha}) = {bound:.6g}, got {R}")
    if m_count < 1:
        raise DomainError("Need at least one triangle")
    values = _check_deltas(deltas, m_count)

    coords = np.zeros((3 * m_count, 2 * m_count))
    labels: list[str] = []
    for m, delta in enumerate(values):
        first, second = 2 * m, 2 * m + 1
        sin_phi = (delta * (1.0 - alpha * alpha) - 2.0 * alpha) / 2.0
        cos_phi = math.sqrt(max(0.0, 1.0 - sin_phi * sin_phi))
        rows = coords[3 * m : 3 * m + 3]
        rows[:, first] = R
        rows[1, second] = 1.0
        rows[2, first] += delta * cos_phi
        rows[2, second] = delta * sin_phi
        labels.extend(f"{name}{m + 1}" for name in "xyz")

    return FiniteMetricSpace.from_coords(
        coords,
        labels=labels,
        name=f"hilbert_triangles(alpha={alpha:g}, R={R:g}, m={m_count})",
        construction=ConstructionSpec(
            family=ConstructionFamily.HILBERT_TRIANGLES,
            params={"alpha": alpha, "R": R, "m_count": m_count, "deltas": values.tolist()},
        ),
    )


def simplex_with_center(n: int) -> FiniteMetricSpace:
    """
    Unit-side regular n-simplex plus its center, n + 2 points.

    The vertices are e_i / sqrt 2 in R^(n+1); the set needs
    SRA(sqrt(2(n+1)/n) - 1).
    """
    if n < 2:
        raise DomainError(f"Simplex dimension must be at least 2, got {n}")
    vertices = np.eye(n + 1) / math.sqrt(2.0)
    center = vertices.mean(axis=0, keepdims=True)
    return FiniteMetricSpace.from_coords(
        np.vstack([vertices, center]),
        labels=[f"v{i}" for i in range(n + 1)] + ["center"],
        name=f"simplex_with_center(n={n})",
        construction=ConstructionSpec(
            family=ConstructionFamily.SIMPLEX_WITH_CENTER, params={"n": n}
        ),
    )
