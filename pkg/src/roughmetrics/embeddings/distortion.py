"""Bi-Lipschitz distortion of a map from a finite metric space into a normed space."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.distance import pdist, squareform

from ..core.errors import DomainError
from ..core.models import Distortion, EmbeddingResult, NormKind
from ..metric.space import FiniteMetricSpace

logger = logging.getLogger(__name__)


def pairwise_norm(
    coords: ArrayLike, norm: Union[NormKind, str] = NormKind.EUCLIDEAN, split: Optional[int] = None
) -> NDArray[np.float64]:
    """
    Pairwise distance matrix of coordinate rows.

    The mixed norm adds the taxicab norm of the first ``split`` coordinates to
    the Euclidean norm of the remaining ones.
    """
    array = np.asarray(coords, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    kind = NormKind(norm)
    if array.shape[0] < 2:
        return np.zeros((array.shape[0], array.shape[0]))

    if kind == NormKind.EUCLIDEAN:
        return squareform(pdist(array, "euclidean"))
    if kind == NormKind.TAXICAB:
        return squareform(pdist(array, "cityblock"))

    if split is None or not 0 <= split <= array.shape[1]:
        raise DomainError(f"Mixed norm needs a split in [0, {array.shape[1]}], got {split}")
    head, tail = array[:, :split], array[:, split:]
    total = np.zeros((array.shape[0], array.shape[0]))
    if head.shape[1]:
        total += squareform(pdist(head, "cityblock"))
    if tail.shape[1]:
        total += squareform(pdist(tail, "euclidean"))
    return total


def distortion(
    space: FiniteMetricSpace,
    coords: ArrayLike,
    norm: Union[NormKind, str] = NormKind.EUCLIDEAN,
    split: Optional[int] = None,
) -> Distortion:
    """
    Exact distortion of the map x_i -> coords[i] over all pairs.

    ``lipschitz`` is the least L with (1/L) d <= ||F(x) - F(y)|| <= L d for the
    map as given; ``rescaled`` is the least such L after the best uniform
    rescaling of the target, i.e. sqrt(expansion * contraction).

    Raises:
        DomainError: If the row count differs from the space or two distinct
            points share an image
    """
    array = np.asarray(coords, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.shape[0] != space.n:
        raise DomainError(f"{array.shape[0]} coordinate rows for {space.n} points")
    if space.n < 2:
        return Distortion(expansion=1.0, contraction=1.0, lipschitz=1.0, spread=1.0, rescaled=1.0)

    iu = np.triu_indices(space.n, k=1)
    source = space.matrix[iu]
    image = pairwise_norm(array, norm, split)[iu]
    if np.any(image <= 0):
        a = int(np.flatnonzero(image <= 0)[0])
        raise DomainError(f"Points {iu[0][a]} and {iu[1][a]} have the same image")

    ratios = image / source
    expansion = float(ratios.max())
    contraction = float(1.0 / ratios.min())
    spread = expansion * contraction
    return Distortion(
        expansion=expansion,
        contraction=contraction,
        lipschitz=max(expansion, contraction),
        spread=spread,
        rescaled=float(np.sqrt(spread)),
    )


def save_coords_csv(result: EmbeddingResult, path: Path) -> None:
    """One row per point; the header carries the norm tag (and split for mixed norms)."""
    header = f"norm={NormKind(result.target_norm).value}"
    if result.split is not None:
        header += f";split={result.split}"
    path.parent.mkdir(parents=True, exist_ok=True)
    coords = np.atleast_2d(np.asarray(result.coords, dtype=np.float64))
    np.savetxt(path, coords, delimiter=",", header=header, fmt="%.17g")
    logger.info(f"Wrote {len(result.coords)} coordinate rows to {path}")
