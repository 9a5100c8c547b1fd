"""Geometric SRA sequences and Cantor-set approximations on the snowflaked line."""

from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import bisect

from ..core.errors import DomainError
from ..core.models import ConstructionFamily, ConstructionSpec
from ..metric.analysis import snowflake
from ..metric.space import FiniteMetricSpace
from ..sra.analysis import hausdorff_dimension_cantor

logger = logging.getLogger(__name__)

ROOT_RESIDUAL = 1e-12
RELATION_TOLERANCE = 1e-10
MAX_CANTOR_LEVEL = 10


def _root_function(x: float, eps: float, alpha: float) -> float:
    return float((1.0 - x) ** alpha + eps * x**alpha - 1.0)


def eps_from_ratio(a: float, alpha: float) -> float:
    """Inverse relation eps = (1 - (1 - a)**alpha) / a**alpha."""
    return float((1.0 - (1.0 - a) ** alpha) / a**alpha)


def solve_root_a(eps: float, alpha: float) -> float:
    """
    Ratio a(eps, alpha) of the geometric SRA(eps) sequence.

    a is the unique root in (0, 1) of (1 - x)**alpha + eps x**alpha - 1; the
    function is positive near 0 for x below e/(1 + e) with e = eps**(1/(1-alpha))
    and negative at 1, so the root is bracketed there.

    Raises:
        DomainError: Unless 0 < eps < alpha < 1
    """
    if not 0 < eps < alpha < 1:
        raise DomainError(f"Need 0 < eps < alpha < 1, got eps={eps}, alpha={alpha}")

    e = eps ** (1.0 / (1.0 - alpha))
    lower = e / (1.0 + e)
    # shrink towards 0 until the bracket has a sign change
    while _root_function(lower, eps, alpha) <= 0:
        lower /= 2.0
        if lower < 1e-300:
            raise DomainError(f"No root bracket found for eps={eps}, alpha={alpha}")

    a = float(bisect(_root_function, lower, 1.0, args=(eps, alpha), xtol=1e-15))
    residual = abs(_root_function(a, eps, alpha))
    if residual >= ROOT_RESIDUAL:
        raise DomainError(f"Root residual {residual:.3g} too large for eps={eps}, alpha={alpha}")
    recovered = eps_from_ratio(a, alpha)
    if abs(recovered - eps) > RELATION_TOLERANCE:
        raise DomainError(f"Ratio a={a} reproduces eps={recovered}, expected {eps}")

    logger.debug(f"solve_root_a(eps={eps}, alpha={alpha}) = {a}")
    return a


def geometric_sra_sequence(
    eps: float, alpha: float, count: int, include_zero: bool = False
) -> FiniteMetricSpace:
    """
    Points a**m (m = 1..count) under |x - y|**alpha, an SRA(eps) set.

    Args:
        eps: Target SRA parameter
        alpha: Snowflake exponent, eps < alpha < 1
        count: Number of sequence terms, at least 2
        include_zero: Add the accumulation point 0
    """
    if count < 2:
        raise DomainError(f"Need at least two terms, got {count}")
    a = solve_root_a(eps, alpha)
    points = a ** np.arange(1, count + 1, dtype=np.float64)
    labels = [f"a^{m}" for m in range(1, count + 1)]
    if include_zero:
        points = np.append(points, 0.0)
        labels.append("0")

    line = FiniteMetricSpace.from_coords(points, labels=labels)
    flake = snowflake(line, alpha)
    flake.name = f"geometric_sra_sequence(eps={eps:g}, alpha={alpha:g}, count={count})"
    flake.construction = ConstructionSpec(
        family=ConstructionFamily.GEOMETRIC_SRA_SEQUENCE,
        params={"eps": eps, "alpha": alpha, "count": count, "include_zero": include_zero},
    )
    flake.metadata["ratio"] = a
    return flake


def eps_prime(alpha: float, a: float) -> float:
    """SRA parameter ((1 - a)**alpha - (1 - 2a)**alpha) / a**alpha of the Cantor set C_a."""
    if not 0 < a < 0.5:
        raise DomainError(f"Cantor ratio must lie in (0, 1/2), got {a}")
    return float(((1.0 - a) ** alpha - (1.0 - 2.0 * a) ** alpha) / a**alpha)


def cantor_endpoints(a: float, level: int) -> np.ndarray:
    """Sorted endpoints of the 2**level intervals of the level-th stage of C_a."""
    left = np.array([0.0])
    length = 1.0
    for _ in range(level):
        left = np.concatenate([a * left, 1.0 - a + a * left])
        length *= a
    return np.sort(np.concatenate([left, left + length]))


def cantor_approx(alpha: float, eps: float, level: int) -> FiniteMetricSpace:
    """
    Endpoints of the level-th approximation of C_a under |x - y|**alpha.

    a = a(eps, alpha) must lie below 1/2, i.e. eps < 2**alpha - 1. The
    resulting set satisfies SRA(eps') with eps' = eps_prime(alpha, a).

    Raises:
        DomainError: If eps >= 2**alpha - 1 or the level is outside [0, 10]
    """
    if not 0 <= level <= MAX_CANTOR_LEVEL:
        raise DomainError(f"Cantor level must lie in [0, {MAX_CANTOR_LEVEL}], got {level}")
    if not 0 < alpha < 1:
        raise DomainError(f"Snowflake exponent must lie in (0, 1), got {alpha}")
    if eps >= 2.0**alpha - 1.0:
        raise DomainError(f"Need eps < 2**alpha - 1 = {2.0**alpha - 1.0:.6g}, got {eps}")

    a = solve_root_a(eps, alpha)
    points = cantor_endpoints(a, level)
    line = FiniteMetricSpace.from_coords(points, labels=[repr(float(x)) for x in points])
    flake = snowflake(line, alpha)
    flake.name = f"cantor_approx(alpha={alpha:g}, eps={eps:g}, level={level})"
    flake.construction = ConstructionSpec(
        family=ConstructionFamily.CANTOR_APPROX,
        params={"alpha": alpha, "eps": eps, "level": level},
    )
    flake.metadata.update(
        ratio=a, eps_prime=eps_prime(alpha, a), dimension=hausdorff_dimension_cantor(a)
    )
    return flake
