"""
Embeddings of comb trees and of ultrametric sequences with one limit point.

The tree map F sends the base segment to the e0 axis and the vertical segment
C_k to the plane spanned by e0 and e_r, r the residue of k mod M in 1..M.
When t_(k+M) <= t_k / 2 for every k the map is 4-bi-Lipschitz into l1.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from ..constructions.trees import TreePoint, check_decreasing, metric_tree, tree_points
from ..core.config import get_settings
from ..core.errors import DomainError
from ..core.models import EmbeddingResult, NormKind, SequenceConditions
from ..metric.space import FiniteMetricSpace
from ..sra.analysis import is_ultrametric
from .distortion import distortion, pairwise_norm
from .schoenberg import schoenberg_embed

logger = logging.getLogger(__name__)


def halving_lag(t: Sequence[float]) -> list[int]:
    """
    For each k, the largest m with t_(k+m) > t_k / 2 inside the prefix.

    t must be nonincreasing; m = 0 always qualifies.
    """
    heights = np.asarray(t, dtype=np.float64)
    lags = []
    for k in range(heights.size):
        above = np.flatnonzero(heights[k:] > heights[k] / 2.0)
        lags.append(int(above[-1]))
    return lags


def lag_bound(delta: float, m: int) -> float:
    """m (log 2 / log(1/(1 - delta)) + 1) - 1, the halving lag forced by decay (delta, m)."""
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    return m * (math.log(2.0) / math.log(1.0 / (1.0 - delta)) + 1.0) - 1.0


def embedding_dimension_bound(delta: float, m: int) -> int:
    """
    Smallest M guaranteed to satisfy t_(k+M) <= t_k / 2 under decay (delta, m).

    The tree map F then lands in R^(M+1).
    """
    return math.floor(lag_bound(delta, m)) + 1


def sequence_condition_check(t: Sequence[float], delta: float, m: int) -> SequenceConditions:
    """
    Check t_(k+m) <= (1 - delta) t_k and the halving lag on a finite prefix.

    Only pairs inside the prefix are compared, so a long enough prefix is
    needed before a failing cond3 or a growing lag means anything.
    """
    tol = get_settings().numerics.tolerance
    heights = np.asarray(t, dtype=np.float64)
    bound = lag_bound(delta, m)

    failures: list[int] = []
    if m < heights.size:
        late, early = heights[m:], heights[:-m]
        failures = np.flatnonzero(late > (1.0 - delta + tol) * early).tolist()
    lags = halving_lag(heights)
    return SequenceConditions(
        delta=delta,
        m=m,
        cond3=len(failures) == 0,
        cond3_failure=int(failures[0]) + 1 if len(failures) else None,
        cond4_sup=max(lags) if lags else 0,
        lag_bound=bound,
    )


def tree_length(t: Sequence[float]) -> float:
    """Length of the comb tree prefix: t_1 for the base plus every vertical segment."""
    heights = check_decreasing(t)
    return float(heights[0] + heights.sum())


def _check_halving(heights: NDArray[np.float64], big_m: int) -> None:
    if big_m < 1:
        raise DomainError(f"M must be positive, got {big_m}")
    tol = get_settings().numerics.tolerance
    late, early = heights[big_m:], heights[:-big_m]
    bad = np.flatnonzero(late > early / 2.0 * (1.0 + tol))
    if bad.size:
        k = int(bad[0]) + 1
        raise DomainError(
            f"t_(k+M) > t_k / 2 at k={k} (M={big_m}): "
            f"{heights[k - 1 + big_m]:.6g} > {heights[k - 1] / 2:.6g}"
        )


def tree_map(heights: NDArray[np.float64], big_m: int, point: TreePoint) -> NDArray[np.float64]:
    """Image of one tree point under F in R^(M+1)."""
    image = np.zeros(big_m + 1)
    if point.segment == 0:
        image[0] = point.coord
        return image
    t_k = float(heights[point.segment - 1])
    image[0] = t_k
    image[(point.segment - 1) % big_m + 1] = point.coord * t_k
    return image


def tree_embed_f(
    t: Sequence[float], big_m: int, points: Optional[Sequence[TreePoint]] = None
) -> EmbeddingResult:
    """
    Map sample points of the comb tree T_t into l1 with the residue map F.

    Args:
        t: Strictly decreasing tree heights
        big_m: Residue modulus M, with t_(k+M) <= t_k / 2 for every k of the prefix
        points: Tree points to map (defaults to the segment endpoints)

    Returns:
        Taxicab coordinates of dimension M + 1 with their measured distortion
        against the intrinsic tree metric

    Raises:
        DomainError: If the halving condition fails, naming the first bad k
    """
    heights = check_decreasing(t)
    _check_halving(heights, big_m)
    chosen = list(points) if points is not None else tree_points(heights, 1)
    space = metric_tree(heights, points=chosen)

    coords = np.stack([tree_map(heights, big_m, p) for p in chosen])
    result = EmbeddingResult(
        coords=coords.tolist(), target_norm=NormKind.TAXICAB, dimension=big_m + 1
    )
    if space.n > 1:
        result.distortion = distortion(space, coords, NormKind.TAXICAB)
        result.exact = result.distortion.lipschitz <= 1.0 + get_settings().numerics.tolerance
    else:
        result.exact = True
    logger.info(
        f"tree_embed_f: {space.n} points into l1^{big_m + 1}"
        + (f", L={result.distortion.lipschitz:.6g}" if result.distortion else "")
    )
    return result


def minimal_modulus(t: Sequence[float]) -> int:
    """Smallest M with t_(k+M) <= t_k / 2 wherever both terms are in the prefix."""
    lags = halving_lag(check_decreasing(t))
    return max(lags) + 1


def _ratio_range(values: NDArray[np.float64]) -> Optional[list[float]]:
    return [float(values.min()), float(values.max())] if values.size else None


def one_limit_embed_g(
    t: Sequence[float],
    clusters: Sequence[FiniteMetricSpace],
    f_result: Optional[EmbeddingResult] = None,
    max_cluster: Optional[int] = None,
) -> tuple[FiniteMetricSpace, EmbeddingResult]:
    """
    Embed an ultrametric sequence with one limit point.

    Level k holds the cluster Z_k of points at distance 2 t_k from the limit;
    point 0 of each cluster is the apex p'_k. Points of different levels k < l
    are at distance 2 t_k. Each point maps to F(p'_k) (+) iota_k(p) / (8L), with
    iota_k the Gram embedding of Z_k placing p'_k at the origin and L the
    distortion of F on the apexes. The target norm is l1 on the F block plus
    Euclidean on the cluster block.

    Args:
        t: Strictly decreasing level heights, one per cluster
        clusters: Ultrametric clusters with diameter at most 2 t_k
        f_result: Embedding of the apex set (the residue map F when None)
        max_cluster: Cluster size bound J (largest cluster when None)

    Returns:
        The assembled space Y and its embedding, with cross-level and
        within-cluster ratio ranges reported separately

    Raises:
        DomainError: On a cluster larger than J, a cluster too wide for its
            level, a non-ultrametric cluster or a level count mismatch
    """
    settings = get_settings()
    tol = settings.numerics.tolerance
    heights = check_decreasing(t)
    if len(clusters) != heights.size:
        raise DomainError(f"{len(clusters)} clusters for {heights.size} levels")
    sizes = [c.n for c in clusters]
    if min(sizes) < 1:
        raise DomainError("Every level needs its apex point")
    big_j = max(sizes) if max_cluster is None else max_cluster
    for k, (cluster, size) in enumerate(zip(clusters, sizes), start=1):
        if size > big_j:
            raise DomainError(f"Cluster Z_{k} has {size} points, more than J={big_j}")
        if cluster.diameter() > 2.0 * heights[k - 1] * (1.0 + tol):
            raise DomainError(f"Cluster Z_{k} is wider than 2 t_{k}")
        if not is_ultrametric(cluster):
            raise DomainError(f"Cluster Z_{k} is not ultrametric")

    if f_result is None:
        apexes = [TreePoint(k, 1.0) for k in range(1, heights.size + 1)]
        f_result = tree_embed_f(heights, minimal_modulus(heights), apexes)
    f_coords = np.asarray(f_result.coords, dtype=np.float64)
    if f_coords.shape[0] != heights.size:
        raise DomainError(f"F gives {f_coords.shape[0]} apex images for {heights.size} levels")
    big_l = f_result.distortion.lipschitz if f_result.distortion else 1.0

    width = big_j - 1
    rows, labels, level = [], [], []
    for k, cluster in enumerate(clusters):
        local = np.zeros((cluster.n, width))
        if cluster.n > 1:
            iota = schoenberg_embed(cluster, base_index=0)
            if not iota.success:
                raise DomainError(f"Cluster Z_{k + 1}: {iota.message}")
            block = np.asarray(iota.coords, dtype=np.float64)
            local[:, : block.shape[1]] = block / (8.0 * big_l)
        for j in range(cluster.n):
            rows.append(np.concatenate([f_coords[k], local[j]]))
            labels.append(f"Z{k + 1}:{cluster.labels[j]}")
            level.append(k)

    n = len(rows)
    levels = np.asarray(level)
    offsets = np.cumsum([0] + sizes)
    matrix = 2.0 * heights[np.minimum.outer(levels, levels)]
    for k, cluster in enumerate(clusters):
        block = slice(offsets[k], offsets[k + 1])
        matrix[block, block] = cluster.matrix
    np.fill_diagonal(matrix, 0.0)
    space = FiniteMetricSpace.from_matrix(
        matrix, labels=labels, name=f"one_limit_sequence(levels={heights.size}, J={big_j})"
    )

    coords = np.stack(rows)
    split = f_coords.shape[1]
    result = EmbeddingResult(
        coords=coords.tolist(),
        target_norm=NormKind.MIXED,
        split=split,
        dimension=split + width,
    )
    if n > 1:
        result.distortion = distortion(space, coords, NormKind.MIXED, split)
        image = pairwise_norm(coords, NormKind.MIXED, split)
        iu = np.triu_indices(n, k=1)
        ratios = image[iu] / matrix[iu]
        same = levels[iu[0]] == levels[iu[1]]
        result.cross_level_ratios = _ratio_range(ratios[~same])
        result.within_cluster_ratios = _ratio_range(ratios[same])

        low, high = 1.0 / (4.0 * big_l), big_l + 1.0 / (4.0 * big_l)
        cross = result.cross_level_ratios
        if cross and (cross[0] < low - tol or cross[1] > high + tol):
            logger.warning(
                f"Cross-level ratios {cross} leave [{low:.6g}, {high:.6g}] for L={big_l:.6g}"
            )
    logger.info(f"one_limit_embed_g: {n} points into dimension {result.dimension}")
    return space, result
