"""Finite metric space representation."""

from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from typing import Any, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.distance import pdist, squareform

from ..core.errors import DomainError, StructuralError
from ..core.models import ConstructionSpec, SpaceKind

logger = logging.getLogger(__name__)

_PDIST_METRIC = {SpaceKind.EUCLIDEAN: "euclidean", SpaceKind.TAXICAB: "cityblock"}


class FiniteMetricSpace:
    """
    Labeled points with an exact pairwise distance evaluator.

    The source is one of: an explicit matrix, coordinates under a norm, or a
    snowflake wrapper over a base space. Builders of example families attach a
    construction reference so the space can be serialized compactly. Instances
    are immutable; the distance matrix is computed once and frozen.
    """

    def __init__(
        self,
        labels: Sequence[str],
        kind: SpaceKind,
        *,
        matrix: Optional[NDArray[np.float64]] = None,
        coords: Optional[NDArray[np.float64]] = None,
        base: Optional[FiniteMetricSpace] = None,
        alpha: Optional[float] = None,
        name: str = "",
        construction: Optional[ConstructionSpec] = None,
        metadata: Optional[dict[str, Any]] = None,
    ) -> None:
        self.labels = [str(label) for label in labels]
        self.kind = SpaceKind(kind)
        self.name = name
        self.construction = construction
        self.metadata: dict[str, Any] = dict(metadata or {})
        self._matrix = matrix
        self._coords = coords
        self.base = base
        self.alpha = alpha

        if len(set(self.labels)) != len(self.labels):
            raise StructuralError("Point labels must be unique")

        if self.kind is SpaceKind.SNOWFLAKE:
            if base is None or alpha is None:
                raise StructuralError("Snowflake space needs a base space and an exponent")
            if len(base) != len(self.labels):
                raise StructuralError("Snowflake labels do not match the base space")
        elif self.kind in _PDIST_METRIC:
            if coords is None or coords.ndim != 2 or coords.shape[0] != len(self.labels):
                raise StructuralError("Coordinates must be a 2-D array with one row per label")
            if not np.all(np.isfinite(coords)):
                raise StructuralError("Coordinates must be finite")
            coords.setflags(write=False)
        else:
            if matrix is None:
                raise StructuralError(f"Space of kind {self.kind.value} needs a matrix")
            _check_matrix(matrix, len(self.labels))
            matrix.setflags(write=False)

    # ------------------------------------------------------------------ builders

    @classmethod
    def from_matrix(
        cls,
        matrix: ArrayLike,
        labels: Optional[Sequence[str]] = None,
        name: str = "",
        construction: Optional[ConstructionSpec] = None,
        metadata: Optional[dict[str, Any]] = None,
    ) -> FiniteMetricSpace:
        """Create a space from an explicit distance matrix."""
        array = np.array(matrix, dtype=np.float64)
        if array.ndim != 2:
            raise StructuralError(f"Distance matrix must be 2-D, got {array.ndim}-D")
        n = array.shape[0]
        return cls(
            labels if labels is not None else _default_labels(n),
            SpaceKind.MATRIX,
            matrix=array,
            name=name,
            construction=construction,
            metadata=metadata,
        )

    @classmethod
    def from_coords(
        cls,
        coords: ArrayLike,
        norm: str = "euclidean",
        labels: Optional[Sequence[str]] = None,
        name: str = "",
        construction: Optional[ConstructionSpec] = None,
        metadata: Optional[dict[str, Any]] = None,
    ) -> FiniteMetricSpace:
        """Create a space from coordinate rows under the Euclidean or taxicab norm."""
        array = np.array(coords, dtype=np.float64)
        if array.ndim == 1:
            array = array.reshape(-1, 1)
        kind = SpaceKind(norm)
        if kind not in _PDIST_METRIC:
            raise DomainError(f"Unsupported coordinate norm: {norm}")
        return cls(
            labels if labels is not None else _default_labels(array.shape[0]),
            kind,
            coords=array,
            name=name,
            construction=construction,
            metadata=metadata,
        )

    # ---------------------------------------------------------------- accessors

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def coords(self) -> Optional[NDArray[np.float64]]:
        return self._coords

    @property
    def matrix(self) -> NDArray[np.float64]:
        """Pairwise distance matrix (read-only, computed lazily)."""
        if self._matrix is None:
            self._matrix = self._evaluate()
            self._matrix.setflags(write=False)
        return self._matrix

    def _evaluate(self) -> NDArray[np.float64]:
        if self.kind is SpaceKind.SNOWFLAKE:
            assert self.base is not None and self.alpha is not None
            return np.power(self.base.matrix, self.alpha)
        assert self._coords is not None
        if self.n < 2:
            return np.zeros((self.n, self.n))
        return squareform(pdist(self._coords, metric=_PDIST_METRIC[self.kind]))

    def distance(self, i: int, j: int) -> float:
        return float(self.matrix[i, j])

    def diameter(self) -> float:
        return float(self.matrix.max()) if self.n else 0.0

    # ----------------------------------------------------------- derived spaces

    def restrict(self, indices: Sequence[int]) -> FiniteMetricSpace:
        """Subspace on the given points, in the given order, labels preserved."""
        idx = [int(i) for i in indices]
        labels = [self.labels[i] for i in idx]
        if self.kind is SpaceKind.SNOWFLAKE:
            assert self.base is not None
            return FiniteMetricSpace(
                labels,
                SpaceKind.SNOWFLAKE,
                base=self.base.restrict(idx),
                alpha=self.alpha,
                name=self.name,
            )
        if self.kind in _PDIST_METRIC:
            assert self._coords is not None
            return FiniteMetricSpace(
                labels, self.kind, coords=self._coords[idx].copy(), name=self.name
            )
        sub = self.matrix[np.ix_(idx, idx)].copy()
        return FiniteMetricSpace(labels, SpaceKind.MATRIX, matrix=sub, name=self.name)

    def permute(self, order: Sequence[int]) -> FiniteMetricSpace:
        """Same points listed in a new order."""
        if sorted(order) != list(range(self.n)):
            raise StructuralError("Order must be a permutation of the point indices")
        return self.restrict(order)

    def scaled(self, factor: float) -> FiniteMetricSpace:
        """All distances multiplied by a positive factor."""
        if factor <= 0:
            raise DomainError(f"Scale factor must be positive, got {factor}")
        return FiniteMetricSpace.from_matrix(self.matrix * factor, self.labels, name=self.name)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(name={self.name!r}, kind={self.kind.value}, n={self.n})"


def _default_labels(n: int) -> list[str]:
    return [str(i) for i in range(n)]


def _check_matrix(matrix: NDArray[np.float64], n_labels: int) -> None:
    """Structural checks; metric axioms are left to validate()."""
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise StructuralError(f"Distance matrix must be square, got shape {matrix.shape}")
    if matrix.shape[0] != n_labels:
        raise StructuralError(
            f"Distance matrix has {matrix.shape[0]} rows but {n_labels} labels were given"
        )
    if not np.all(np.isfinite(matrix)):
        raise StructuralError("Distance matrix contains NaN or infinite entries")
    if np.any(matrix < 0):
        i, j = np.argwhere(matrix < 0)[0]
        raise StructuralError(f"Negative distance at ({i}, {j}): {matrix[i, j]}")


def iter_triple_blocks(n: int) -> Iterator[tuple[int, NDArray[np.intp], NDArray[np.intp]]]:
    """
    Yield (i, J, K) for every i, where J < K range over all pairs above i.

    Every unordered triple i < j < k appears exactly once, in lexicographic order.
    """
    for i in range(n - 2):
        rest = n - i - 1
        jj, kk = np.triu_indices(rest, k=1)
        yield i, jj + i + 1, kk + i + 1
