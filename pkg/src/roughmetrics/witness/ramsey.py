"""Red/blue coloring of ordered triples and monochromatic clique search."""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from ..core.config import get_settings
from ..core.errors import DomainError
from ..core.models import CliqueColor, CliqueResult
from ..ordered.ordered_set import OrderedSet
from ..search.engine import HypercliqueSearch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TripleColoring:
    """
    Color of every triple of an ordered set.

    ``red[a, b, c]`` holds the color of the sorted triple for every permutation
    of (a, b, c). Entries with a repeated index are True in both tensors.
    """

    alpha: float
    red: NDArray[np.bool_]
    blue: NDArray[np.bool_]

    @property
    def n(self) -> int:
        return int(self.red.shape[0])

    @property
    def red_fraction(self) -> float:
        """Share of red triples among all i < j < k."""
        n = self.n
        total = n * (n - 1) * (n - 2) // 6
        if total == 0:
            return 1.0
        return float(np.count_nonzero(self.red & _distinct_mask(n))) / (6 * total)

    def is_red(self, i: int, j: int, k: int) -> bool:
        return bool(self.red[i, j, k])


def _distinct_mask(n: int) -> NDArray[np.bool_]:
    a = np.arange(n)
    return (
        (a[:, None, None] != a[None, :, None])
        & (a[None, :, None] != a[None, None, :])
        & (a[:, None, None] != a[None, None, :])
    )


def color_triples(s: OrderedSet, alpha: float, tol: Optional[float] = None) -> TripleColoring:
    """
    Color i < j < k red iff d(x_j, x_k) <= d(x_i, x_k) + alpha d(x_i, x_j), else blue.

    Equality counts as red.

    Raises:
        DomainError: If the set exceeds the dense table limit
    """
    settings = get_settings()
    tol = settings.numerics.feasibility_tolerance if tol is None else tol
    n = s.size
    if n > settings.search.max_dense_points:
        raise DomainError(
            f"{n} points exceed the dense search limit of {settings.search.max_dense_points}"
        )

    d = s.matrix
    # position-sorted view: lo < mid < hi along the three axes
    lo, mid, hi = np.sort(np.stack(np.meshgrid(*(np.arange(n),) * 3, indexing="ij")), axis=0)
    red = d[mid, hi] <= d[lo, hi] + alpha * d[lo, mid] + tol
    repeated = ~_distinct_mask(n)
    blue = ~red | repeated
    red = red | repeated
    return TripleColoring(alpha=alpha, red=red, blue=blue)


def _clique(tensor: NDArray[np.bool_], size: int, budget: int) -> tuple[list[int], int, bool]:
    search = HypercliqueSearch(tensor, budget, target=size)
    best = search.run([], np.arange(tensor.shape[0]))
    return best, search.nodes, search.exhausted


def mono_clique_search(
    coloring: TripleColoring, k: int, p: int, budget: Optional[int] = None
) -> CliqueResult:
    """
    Look for a red K-clique first, then for a blue p-clique.

    Without a budget, sets up to the exhaustive limit are searched to completion;
    larger ones use the configured node budget. Running out is flagged
    in the result.
    """
    search = get_settings().search
    if budget is None:
        small = coloring.red.shape[0] <= search.exhaustive_limit
        budget = sys.maxsize if small else search.budget
    if k < 1 or p < 1:
        raise DomainError(f"Clique sizes must be positive, got K={k}, p={p}")

    red, red_nodes, red_exhausted = _clique(coloring.red, k, budget)
    if len(red) >= k:
        return CliqueResult(color=CliqueColor.RED, subset=red[:k], nodes_explored=red_nodes)

    blue, blue_nodes, blue_exhausted = _clique(coloring.blue, p, budget)
    nodes = red_nodes + blue_nodes
    if len(blue) >= p:
        logger.info(f"No red {k}-clique; blue {p}-clique {blue[:p]}")
        return CliqueResult(
            color=CliqueColor.BLUE, subset=blue[:p], nodes_explored=nodes, exhausted=red_exhausted
        )
    return CliqueResult(
        color=CliqueColor.NONE, nodes_explored=nodes, exhausted=red_exhausted or blue_exhausted
    )
