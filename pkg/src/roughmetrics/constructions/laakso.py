"""Vertical slices of the Laakso graph levels."""

from __future__ import annotations

import logging
from fractions import Fraction
from itertools import product
from typing import Optional

import numpy as np

from ..core.errors import DomainError
from ..core.models import ConstructionFamily, ConstructionSpec
from ..metric.space import FiniteMetricSpace

logger = logging.getLogger(__name__)

MAX_LEVEL = 10


def laakso_words(m: int) -> list[str]:
    """Binary words of length m in lexicographic order."""
    return ["".join(bits) for bits in product("01", repeat=m)]


def first_difference(v: str, w: str) -> int:
    """0-based index of the first differing letter; len(v) when equal."""
    for index, (a, b) in enumerate(zip(v, w)):
        if a != b:
            return index
    return len(v)


def laakso_weight(k: int) -> int:
    """Numerator c(k) over 4**m: c(0) = 2 and c(k) = 4(4**k - 1)/3 otherwise."""
    if k == 0:
        return 2
    return 4 * (4**k - 1) // 3


def laakso_distance(v: str, w: str) -> Fraction:
    """Exact distance between two slice points p_v and p_w of the same level."""
    if len(v) != len(w):
        raise DomainError("Laakso words must have the same length")
    m = len(v)
    f = first_difference(v, w)
    if f == m:
        return Fraction(0)
    return Fraction(laakso_weight(m - 1 - f), 4**m)


def laakso_fractions(m: int) -> list[list[Fraction]]:
    """Exact distance table of F_m, rows and columns in lexicographic word order."""
    words = laakso_words(m)
    return [[laakso_distance(v, w) for w in words] for v in words]


def _check_level(m: int) -> None:
    if not 1 <= m <= MAX_LEVEL:
        raise DomainError(f"Laakso level must lie in [1, {MAX_LEVEL}], got {m}")


def laakso_level(m: int) -> FiniteMetricSpace:
    """
    The 2**m-point slice F_m, an ultrametric space.

    Distances are c(k)/4**m with k = m - 1 - (first differing index), evaluated
    exactly and converted to floats once.
    """
    _check_level(m)
    words = laakso_words(m)
    n = len(words)
    # the distance only depends on the first differing index, so fill by blocks
    matrix = np.zeros((n, n))
    for f in range(m):
        value = float(Fraction(laakso_weight(m - 1 - f), 4**m))
        block = n >> f
        half = block >> 1
        for start in range(0, n, block):
            left = slice(start, start + half)
            right = slice(start + half, start + block)
            matrix[left, right] = value
            matrix[right, left] = value

    return FiniteMetricSpace.from_matrix(
        matrix,
        labels=[f"p{w}" for w in words],
        name=f"laakso_level(m={m})",
        construction=ConstructionSpec(family=ConstructionFamily.LAAKSO_LEVEL, params={"m": m}),
    )


def laakso_doubled(
    m: int, q: Optional[float] = None, q_prime: Optional[float] = None
) -> FiniteMetricSpace:
    """
    F'_m: two copies of F_m at abscissae q and q', again ultrametric.

    The copies are at mutual distance max(|q' - q|, diam F_m). Omitted
    abscissae sit 2 / 4**m either side of 1/2, which gives 6/16 and 10/16 at
    level 2 and keeps both slices on the level-m grid.
    """
    _check_level(m)
    offset = 2.0 / 4.0**m
    q = 0.5 - offset if q is None else q
    q_prime = 0.5 + offset if q_prime is None else q_prime
    if q == q_prime:
        raise DomainError("The two abscissae must differ")
    single = laakso_level(m).matrix
    n = single.shape[0]
    cross = max(abs(q_prime - q), float(single.max()))

    matrix = np.full((2 * n, 2 * n), cross)
    matrix[:n, :n] = single
    matrix[n:, n:] = single
    words = laakso_words(m)
    labels = [f"q{w}" for w in words] + [f"q'{w}" for w in words]
    return FiniteMetricSpace.from_matrix(
        matrix,
        labels=labels,
        name=f"laakso_doubled(m={m})",
        construction=ConstructionSpec(
            family=ConstructionFamily.LAAKSO_LEVEL,
            params={"m": m, "doubled": True, "q": q, "q_prime": q_prime},
        ),
    )


def gray_code_order(m: int) -> list[int]:
    """
    Reflected Gray code as a permutation of the lexicographic word indices.

    Every prefix cluster of F_m is contiguous in this order, which makes it
    self-contracting; consecutive words differ in one letter.
    """
    _check_level(m)
    return [i ^ (i >> 1) for i in range(2**m)]
