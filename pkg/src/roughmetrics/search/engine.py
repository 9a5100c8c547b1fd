"""
Exact maximum-cardinality SRA(alpha) subset search.

A subset satisfies SRA(alpha) iff every triple inside it does, so the search
is a clique problem in the 3-uniform hypergraph of feasible triples. The
branch-and-bound below extends subsets in lexicographic order and only checks
the triples that involve the newest point.
"""

from __future__ import annotations

import logging
import math
import threading
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from typing import Optional, Union

import numpy as np
from numpy.typing import NDArray

from ..constructions.registry import build_space
from ..core.config import get_settings
from ..core.errors import DomainError
from ..core.models import ConstructionSpec, GrowthProfile, GrowthRow, SearchResult
from ..metric.analysis import snowflake
from ..metric.space import FiniteMetricSpace
from ..sra.analysis import sra_check

logger = logging.getLogger(__name__)


EXHAUSTIVE_MAX_POINTS = 16

FamilyBuilder = Union[Callable[[int], FiniteMetricSpace], tuple[ConstructionSpec, str]]


class _Stop(Exception):
    """Unwinds the search when the budget or the target is reached."""


def feasible_triples(
    space: FiniteMetricSpace, alpha: float, tol: Optional[float] = None
) -> NDArray[np.bool_]:
    """
    Boolean tensor F with F[i, j, k] iff the triple satisfies SRA(alpha).

    Triples with a repeated index are feasible. The tensor is symmetric under
    every permutation of its axes.

    Raises:
        DomainError: If the space exceeds the dense table limit
    """
    settings = get_settings()
    tol = settings.numerics.feasibility_tolerance if tol is None else tol
    n = space.n
    if n > settings.search.max_dense_points:
        raise DomainError(
            f"{n} points exceed the dense search limit of {settings.search.max_dense_points}"
        )

    d = space.matrix
    feasible = np.empty((n, n, n), dtype=bool)
    for i in range(n):
        sides = np.sort(
            np.stack(np.broadcast_arrays(d[i, :, None], d, d[i, None, :])), axis=0
        )
        lo, mid, hi = sides
        excess = hi - mid
        kernel = np.divide(excess, lo, out=np.where(excess > 0, np.inf, 0.0), where=lo > 0)
        feasible[i] = kernel <= alpha + tol
    return feasible


class HypercliqueSearch:
    """
    Branch-and-bound for the largest index set whose triples are all admissible.

    The admissibility tensor must be symmetric and True on repeated indices.
    One instance holds the node budget and incumbent size shared by every
    branch, so root branches may run on separate threads.
    """

    def __init__(
        self, feasible: NDArray[np.bool_], budget: int, target: Optional[int] = None
    ) -> None:
        self.feasible = feasible
        self.budget = budget
        self.target = target
        self.nodes = 0
        self.exhausted = False
        self.reached_target = False
        self.shared_best = 0
        self._lock = threading.Lock()

    def _tick(self) -> None:
        with self._lock:
            self.nodes += 1
            if self.nodes > self.budget:
                self.exhausted = True
            if self.exhausted or self.reached_target:
                raise _Stop

    def _publish(self, size: int) -> None:
        with self._lock:
            self.shared_best = max(self.shared_best, size)
            if self.target is not None and size >= self.target:
                self.reached_target = True

    def run(self, cur: list[int], cand: NDArray[np.intp]) -> list[int]:
        """Best extension of cur found with candidates cand (lexicographically first)."""
        best = list(cur)
        self._publish(len(best))

        def extend(cur: list[int], cand: NDArray[np.intp]) -> None:
            nonlocal best
            for idx, v in enumerate(cand):
                bound = len(cur) + len(cand) - idx
                # ties with this branch's incumbent are pruned; ties with other
                # branches are kept for the final lexicographic merge
                if bound <= len(best) or bound < self.shared_best:
                    return
                self._tick()
                rest = cand[idx + 1 :]
                if cur and rest.size:
                    rest = rest[self.feasible[v][np.ix_(cur, rest)].all(axis=0)]
                grown = cur + [int(v)]
                if len(grown) > len(best):
                    best = grown
                    self._publish(len(best))
                extend(grown, rest)

        try:
            extend(list(cur), cand)
        except _Stop:
            pass
        return best


def max_sra_subset(
    space: FiniteMetricSpace,
    alpha: float,
    budget: Optional[int] = None,
    threads: Optional[int] = None,
    target: Optional[int] = None,
) -> SearchResult:
    """
    Largest subset of the space satisfying SRA(alpha).

    Ties are broken towards the lexicographically smallest index list, so the
    answer does not depend on the thread count. When the node budget runs out
    the best incumbent is returned with ``proved_optimal=False``.

    Args:
        space: Space to search
        alpha: SRA parameter, alpha >= 0
        budget: Node limit (settings default when None)
        threads: Worker threads splitting the root branches (settings default when None)
        target: Stop as soon as a subset of this size is found

    Raises:
        DomainError: If alpha is negative or the space is too large for the dense table
    """
    if alpha < 0:
        raise DomainError(f"alpha must be nonnegative, got {alpha}")
    settings = get_settings()
    budget = settings.search.budget if budget is None else budget
    threads = settings.threads if threads is None else threads

    n = space.n
    feasible = feasible_triples(space, alpha)
    search = HypercliqueSearch(feasible, budget, target)

    if threads <= 1 or n < 2:
        best = search.run([], np.arange(n))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            branches = list(
                pool.map(lambda r: search.run([r], np.arange(r + 1, n)), range(n))
            )
        best = min(branches, key=lambda s: (-len(s), s))
        search.nodes += n

    proved = not search.exhausted and not (search.reached_target and len(best) < n)
    if search.exhausted:
        logger.warning(f"Search budget of {budget} nodes exhausted; result is not proved optimal")

    result = SearchResult(
        alpha=alpha,
        cardinality=len(best),
        subset=best,
        nodes_explored=search.nodes,
        proved_optimal=proved,
    )
    logger.info(
        f"max_sra_subset(alpha={alpha}) on {n} points: {result.cardinality} "
        f"({result.nodes_explored} nodes, optimal={result.proved_optimal})"
    )
    return result


def exhaustive_max_sra_subset(space: FiniteMetricSpace, alpha: float) -> SearchResult:
    """
    Brute-force oracle: test subsets by decreasing size, lexicographically.

    Raises:
        DomainError: For more than 16 points
    """
    n = space.n
    if n > EXHAUSTIVE_MAX_POINTS:
        raise DomainError(f"Exhaustive search is limited to {EXHAUSTIVE_MAX_POINTS} points")
    feasible = feasible_triples(space, alpha)

    checked = 0
    for size in range(n, 0, -1):
        for combo in combinations(range(n), size):
            checked += 1
            if feasible[np.ix_(combo, combo, combo)].all():
                return SearchResult(
                    alpha=alpha,
                    cardinality=size,
                    subset=list(combo),
                    nodes_explored=checked,
                    proved_optimal=True,
                )
    return SearchResult(
        alpha=alpha, cardinality=0, subset=[], nodes_explored=checked, proved_optimal=True
    )


def max_ultrametric_subset(
    space: FiniteMetricSpace, budget: Optional[int] = None
) -> SearchResult:
    """Largest ultrametric subset, i.e. SRA(0)."""
    return max_sra_subset(space, 0.0, budget=budget)


def _family_builder(family: FamilyBuilder) -> Callable[[int], FiniteMetricSpace]:
    if callable(family):
        return family
    spec, size_param = family

    def build(size: int) -> FiniteMetricSpace:
        params = {**spec.params, size_param: size}
        return build_space(ConstructionSpec(family=spec.family, params=params, seed=spec.seed))

    return build


def sra_growth_profile(
    family: FamilyBuilder,
    alpha: float,
    sizes: Sequence[int],
    budget: Optional[int] = None,
) -> GrowthProfile:
    """
    Maximum SRA(alpha) cardinality along a growing family.

    Args:
        family: Callable size -> space, or a construction spec plus the name of
            the parameter that carries the size
        alpha: SRA parameter
        sizes: Size parameters to probe
        budget: Node limit per search
    """
    build = _family_builder(family)
    profile = GrowthProfile(alpha=alpha)
    for size in sizes:
        space = build(size)
        result = max_sra_subset(space, alpha, budget=budget)
        profile.rows.append(GrowthRow(size=size, points=space.n, result=result))

    cards = [row.result.cardinality for row in profile.rows]
    if any(b < a for a, b in zip(cards, cards[1:])):
        logger.warning(f"Growth profile is not monotone: {cards}")
    return profile


def snowflake_embeddability_cardinality_check(space: FiniteMetricSpace, alpha: float) -> bool:
    """
    Whether snowflake(space, alpha) satisfies SRA(2**alpha - 1).

    Every alpha-snowflake does, which bounds how large a snowflaked space can
    sit inside an SRA(2**alpha - 1) free host.
    """
    if not 0 < alpha <= 1:
        raise DomainError(f"Snowflake exponent must lie in (0, 1], got {alpha}")
    return sra_check(snowflake(space, alpha), math.pow(2.0, alpha) - 1.0).passed
