"""Ordered finite sets: rough self-contraction, medial SRA and bounded turning."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.config import get_settings
from ..core.errors import DomainError, StructuralError
from ..core.models import ElementaryCheck, OrderReport
from ..metric.space import FiniteMetricSpace, iter_triple_blocks
from ..sra.analysis import sra_check

logger = logging.getLogger(__name__)


class OrderedSet:
    """
    A finite metric space listed in curve order.

    Position k holds the point ``space.labels[order[k]]``. Points must be
    pairwise distinct; all kernels below are computed on positions.
    """

    def __init__(self, space: FiniteMetricSpace, order: Optional[Sequence[int]] = None) -> None:
        order = list(range(space.n)) if order is None else [int(i) for i in order]
        if sorted(order) != list(range(space.n)):
            raise StructuralError("Order must be a permutation of the point indices")

        self.space = space
        self.order = order
        self.points = space.permute(order)

        d = self.points.matrix
        off_diagonal = d[~np.eye(self.size, dtype=bool)]
        if off_diagonal.size and off_diagonal.min() <= 0:
            raise StructuralError("Ordered sets need pairwise distinct points")

    @property
    def size(self) -> int:
        return self.points.n

    @property
    def matrix(self) -> NDArray[np.float64]:
        """Distances between positions."""
        return self.points.matrix

    def reversed(self) -> OrderedSet:
        """Same points traversed in the opposite direction."""
        return OrderedSet(self.space, list(reversed(self.order)))

    def subset(self, positions: Sequence[int]) -> OrderedSet:
        """Ordered subset at increasing positions."""
        positions = sorted(int(p) for p in positions)
        return OrderedSet(self.points.restrict(positions))

    def report(self) -> OrderReport:
        """Every kernel and discrete quantity in one record."""
        if self.size < 2:
            return OrderReport(
                size=self.size,
                lambda_contracting=-1.0,
                lambda_expanding=-1.0,
                medial_theta=-1.0,
            )
        return OrderReport(
            size=self.size,
            lambda_contracting=lambda_required_contracting(self),
            lambda_expanding=lambda_required_expanding(self),
            medial_theta=medial_theta_required(self),
            bounded_turning=bounded_turning_constant(self),
            length=discrete_length(self),
            diameter=discrete_diameter(self),
        )

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"OrderedSet(size={self.size}, space={self.space.name!r})"


def _kernel_max(d: NDArray[np.float64], n: int, medial: bool) -> float:
    """
    Max over i < j < k of (d_jk - d_ik) / d_ij, or (d_ik - d_ij) / d_jk when medial.

    Floored at -1, the vacuous value.
    """
    best = -1.0
    for i, jj, kk in iter_triple_blocks(n):
        d_ij, d_jk, d_ik = d[i, jj], d[jj, kk], d[i, kk]
        if medial:
            values = (d_ik - d_ij) / d_jk
        else:
            values = (d_jk - d_ik) / d_ij
        if values.size:
            best = max(best, float(values.max()))
    return best


def lambda_required_contracting(s: OrderedSet) -> float:
    """
    Least lambda with d(x2, x3) <= d(x1, x3) + lambda d(x1, x2) on every ordered triple.

    Returns -1 for fewer than three points.
    """
    return _kernel_max(s.matrix, s.size, medial=False)


def lambda_required_expanding(s: OrderedSet) -> float:
    """Contracting kernel of the reversed order."""
    return lambda_required_contracting(s.reversed())


def medial_theta_required(s: OrderedSet) -> float:
    """Least theta with d(x1, x3) <= d(x1, x2) + theta d(x2, x3) on every ordered triple."""
    return _kernel_max(s.matrix, s.size, medial=True)


def arc_diameters(s: OrderedSet) -> NDArray[np.float64]:
    """Matrix whose (x, y) entry, x <= y, is the diameter of positions x..y."""
    d = s.matrix
    n = s.size
    diam = np.zeros((n, n))
    for gap in range(1, n):
        x = np.arange(n - gap)
        y = x + gap
        diam[x, y] = np.maximum(np.maximum(diam[x, y - 1], diam[x + 1, y]), d[x, y])
    return diam


def bounded_turning_constant(s: OrderedSet) -> float:
    """Least M with diam(arc from x to y) <= M d(x, y) for all positions x < y."""
    if s.size < 2:
        raise DomainError("Bounded turning needs at least two points")
    iu, ju = np.triu_indices(s.size, k=1)
    return float((arc_diameters(s)[iu, ju] / s.matrix[iu, ju]).max())


def m_lambda(lam: float) -> float:
    """Bounded turning constant 2(1 + lambda)/(1 - lambda) of rough lambda-self-monotone sets."""
    if lam >= 1:
        raise DomainError(f"lambda must be below 1, got {lam}")
    if lam < 0:
        return 2.0
    return 2.0 * (1.0 + lam) / (1.0 - lam)


def discrete_length(s: OrderedSet) -> float:
    """Sum of consecutive distances."""
    if s.size < 2:
        raise DomainError("Discrete length needs at least two points")
    d = s.matrix
    idx = np.arange(s.size - 1)
    return float(d[idx, idx + 1].sum())


def discrete_diameter(s: OrderedSet) -> float:
    """Distance between the first and the last point."""
    if s.size < 2:
        raise DomainError("Discrete diameter needs at least two points")
    return float(s.matrix[0, -1])


def elementary_combination_check(
    s: OrderedSet, lam: float, tol: Optional[float] = None
) -> ElementaryCheck:
    """
    Combine one-sided kernels into the full SRA(lambda) statement.

    When the set is rough lambda-self-contracting, rough lambda-self-expanding
    and medial SRA(lambda), the whole set satisfies SRA(lambda). The SRA verdict
    is always computed by brute force; unmet preconditions are reported.

    Raises:
        DomainError: If lambda is outside [0, 1]
    """
    if not 0 <= lam <= 1:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    tol = get_settings().numerics.tolerance if tol is None else tol

    contracting = lambda_required_contracting(s)
    expanding = lambda_required_expanding(s)
    medial = medial_theta_required(s)
    met = max(contracting, expanding, medial) <= lam + tol
    holds = sra_check(s.points, lam, tol=tol).passed

    if met and not holds:
        logger.warning(f"SRA({lam}) fails although all one-sided kernels are within bounds")
    return ElementaryCheck(
        lam=lam,
        preconditions_met=met,
        lambda_contracting=contracting,
        lambda_expanding=expanding,
        medial_theta=medial,
        sra_holds=holds,
    )


# ------------------------------------------------------------------ curves


def discretize_curve(points: ArrayLike, count: Optional[int] = None, name: str = "") -> OrderedSet:
    """
    Ordered set from a sampled planar (or higher-dimensional) curve.

    Args:
        points: Curve samples in traversal order, one row per sample
        count: Keep this many samples at evenly spaced indices (all when None)
        name: Name of the resulting space
    """
    array = np.asarray(points, dtype=np.float64)
    if array.ndim != 2:
        raise DomainError("Curve samples must be a 2-D array")
    if count is not None:
        if not 2 <= count <= array.shape[0]:
            raise DomainError(f"Cannot keep {count} of {array.shape[0]} samples")
        idx = np.unique(np.round(np.linspace(0, array.shape[0] - 1, count)).astype(int))
        array = array[idx]
    return OrderedSet(FiniteMetricSpace.from_coords(array, name=name))


def log_spiral(count: int, growth: float, turn: float) -> OrderedSet:
    """
    Discretized logarithmic spiral r = exp(growth * phi) at phi_k = k * turn.

    Positive growth traverses the spiral outwards.
    """
    if count < 2:
        raise DomainError("A spiral needs at least two samples")
    if turn <= 0:
        raise DomainError(f"Turn angle must be positive, got {turn}")
    phi = np.arange(count) * turn
    radius = np.exp(growth * phi)
    coords = np.column_stack([radius * np.cos(phi), radius * np.sin(phi)])
    name = f"log_spiral(count={count}, growth={growth:g}, turn={turn:g})"
    logger.debug(f"{name}: radius ratio {math.exp(growth * turn):.6g} per step")
    return discretize_curve(coords, name=name)
