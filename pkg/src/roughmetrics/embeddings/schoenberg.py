"""
Isometric Euclidean embedding through the Gram matrix.

Every finite ultrametric space of N + 1 points embeds isometrically in R^N,
so the Gram test below always succeeds on ultrametric input.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.linalg import eigh
from scipy.spatial.distance import pdist, squareform

from ..core.config import get_settings
from ..core.errors import DomainError
from ..core.models import EmbeddingResult, NormKind
from ..metric.space import FiniteMetricSpace
from .distortion import distortion

logger = logging.getLogger(__name__)


def schoenberg_embed(space: FiniteMetricSpace, base_index: int = 0) -> EmbeddingResult:
    """
    Embed a finite metric space isometrically in Euclidean space, if possible.

    The Gram matrix G_ij = (d(x0, xi)**2 + d(x0, xj)**2 - d(xi, xj)**2) / 2 is
    positive semidefinite iff such an embedding exists; coordinates are the
    scaled eigenvectors of its nonzero eigenvalues, so x0 lands at the origin.

    Args:
        space: Space with at least one point
        base_index: Point mapped to the origin

    Returns:
        Coordinates of dimension rank(G), or ``success=False`` when G has an
        eigenvalue below -tolerance * max|eigenvalue|

    Raises:
        DomainError: If the space is empty or base_index is out of range
    """
    settings = get_settings()
    n = space.n
    if n < 1:
        raise DomainError("Cannot embed an empty space")
    if not 0 <= base_index < n:
        raise DomainError(f"Base index {base_index} out of range for {n} points")

    d = space.matrix
    d0 = d[base_index]
    gram = 0.5 * (d0[:, None] ** 2 + d0[None, :] ** 2 - d**2)
    eigenvalues, eigenvectors = eigh(gram)
    scale = float(np.abs(eigenvalues).max()) if n > 1 else 0.0
    threshold = settings.numerics.psd_tolerance * scale

    if eigenvalues[0] < -threshold:
        logger.info(
            f"Gram matrix of {space.name or 'space'} has eigenvalue {eigenvalues[0]:.3g}; "
            "not Euclidean-embeddable"
        )
        return EmbeddingResult(
            success=False,
            message=f"not Euclidean-embeddable (Gram eigenvalue {eigenvalues[0]:.6g})",
        )

    keep = np.flatnonzero(eigenvalues > threshold)[::-1]
    coords = eigenvectors[:, keep] * np.sqrt(eigenvalues[keep])
    # deterministic orientation: largest entry of each axis is positive
    if coords.shape[1]:
        pivots = np.abs(coords).argmax(axis=0)
        coords *= np.sign(coords[pivots, np.arange(coords.shape[1])])
        coords -= coords[base_index]

    dimension = int(coords.shape[1])
    if dimension and n > 1:
        error = float(np.abs(squareform(pdist(coords)) - d).max())
    else:
        error = float(d.max()) if n > 1 else 0.0
    exact = error <= settings.numerics.tolerance * max(1.0, space.diameter())

    result = EmbeddingResult(
        coords=coords.tolist() if dimension else [[0.0] for _ in range(n)],
        target_norm=NormKind.EUCLIDEAN,
        dimension=dimension,
        exact=exact,
        message=f"max reconstruction error {error:.3g}",
    )
    if n > 1 and dimension:
        result.distortion = distortion(space, coords, NormKind.EUCLIDEAN)
    logger.debug(f"schoenberg_embed: {n} points into R^{dimension}, error {error:.3g}")
    return result
