"""Validation, snowflaking, L^p exponents, comparison angles and doubling probes."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from typing import Optional

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import bisect

from ..core.config import get_settings
from ..core.errors import DomainError
from ..core.models import (
    ComparisonAngles,
    DoublingProbe,
    SpaceKind,
    ValidationReport,
    Violation,
    ViolationKind,
)
from .space import FiniteMetricSpace, iter_triple_blocks

logger = logging.getLogger(__name__)


def validate(space: FiniteMetricSpace, tol: Optional[float] = None) -> ValidationReport:
    """
    Check every metric axiom and report violations exceeding the tolerance.

    Structural problems (non-square, negative or NaN entries) are rejected when the
    space is built; this reports symmetry, identity, positivity and triangle failures.

    Args:
        space: Space to check
        tol: Nonnegative tolerance (defaults to the configured tolerance)

    Returns:
        ValidationReport listing violations in index order
    """
    tol = get_settings().numerics.tolerance if tol is None else tol
    if tol < 0:
        raise DomainError(f"Tolerance must be nonnegative, got {tol}")

    d = space.matrix
    n = space.n
    violations: list[Violation] = []

    for i in range(n):
        if abs(d[i, i]) > tol:
            violations.append(
                Violation(kind=ViolationKind.IDENTITY, indices=[i, i], residual=float(d[i, i]))
            )

    iu, ju = np.triu_indices(n, k=1)
    asym = np.abs(d[iu, ju] - d[ju, iu])
    for idx in np.flatnonzero(asym > tol):
        violations.append(
            Violation(
                kind=ViolationKind.SYMMETRY,
                indices=[int(iu[idx]), int(ju[idx])],
                residual=float(asym[idx]),
            )
        )
    for idx in np.flatnonzero(d[iu, ju] <= tol):
        violations.append(
            Violation(
                kind=ViolationKind.POSITIVITY,
                indices=[int(iu[idx]), int(ju[idx])],
                residual=float(-d[iu[idx], ju[idx]]),
            )
        )

    # residual[j, k] = d(i, j) - d(i, k) - d(k, j)
    for i in range(n):
        residual = d[i][:, None] - d[i][None, :] - d.T
        residual[:, i] = -np.inf
        np.fill_diagonal(residual, -np.inf)
        residual[: i + 1, :] = -np.inf
        for j, k in np.argwhere(residual > tol):
            violations.append(
                Violation(
                    kind=ViolationKind.TRIANGLE,
                    indices=[i, int(j), int(k)],
                    residual=float(residual[j, k]),
                )
            )

    report = ValidationReport.from_violations(violations, tol)
    logger.debug(f"validate({space!r}, tol={tol}): {len(violations)} violation(s)")
    return report


def snowflake(space: FiniteMetricSpace, alpha: float) -> FiniteMetricSpace:
    """
    Raise every distance to the power alpha.

    Repeated snowflaking composes exponents against the original base space, so
    snowflake(snowflake(X, a), b) evaluates X**(a*b) directly.

    Raises:
        DomainError: If alpha is outside (0, 1]
    """
    if not 0 < alpha <= 1:
        raise DomainError(f"Snowflake exponent must lie in (0, 1], got {alpha}")

    base, exponent = space, alpha
    if space.kind is SpaceKind.SNOWFLAKE:
        assert space.base is not None and space.alpha is not None
        base, exponent = space.base, space.alpha * alpha

    name = f"{space.name}^{alpha:g}" if space.name else ""
    return FiniteMetricSpace(
        space.labels, SpaceKind.SNOWFLAKE, base=base, alpha=exponent, name=name
    )


def _lp_residual(ratio_a: float, ratio_b: float, p: float) -> float:
    return float(ratio_a**p + ratio_b**p - 1.0)


def _sorted_sides(
    d: NDArray[np.float64], i: int, jj: NDArray[np.intp], kk: NDArray[np.intp]
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Largest, middle and smallest side of each triple (i, j, k)."""
    sides = np.stack([d[i, jj], d[jj, kk], d[i, kk]], axis=1)
    sides.sort(axis=1)
    return sides[:, 2], sides[:, 1], sides[:, 0]


def max_lp_exponent(space: FiniteMetricSpace, bracket_max: Optional[float] = None) -> float:
    """
    Largest p for which d**p still satisfies the triangle inequality.

    Per triple with largest side C and other sides A, B the exponent is the root
    of (A/C)**p + (B/C)**p = 1; the space value is the infimum over triples.
    Ultrametric triples (C equal to the larger other side) contribute infinity, as
    do roots beyond the bracket.

    Returns:
        p* in [1, inf]
    """
    upper = get_settings().numerics.lp_bracket_max if bracket_max is None else bracket_max
    d = space.matrix
    best = math.inf

    for i, jj, kk in iter_triple_blocks(space.n):
        hi, mid, lo = _sorted_sides(d, i, jj, kk)
        live = (hi > mid) & (lo > 0)
        if not np.any(live):
            continue
        ra, rb = mid[live] / hi[live], lo[live] / hi[live]
        # only triples whose root lies below the current best matter
        probe = min(best, upper)
        at_probe = ra**probe + rb**probe - 1.0
        candidates = np.flatnonzero(at_probe < 0)
        for idx in candidates[np.argsort(at_probe[candidates])]:
            a, b = float(ra[idx]), float(rb[idx])
            limit = min(best, upper)
            if _lp_residual(a, b, limit) >= 0:
                continue
            if _lp_residual(a, b, 1.0) <= 0:
                best = 1.0
                break
            best = float(bisect(lambda p, a=a, b=b: _lp_residual(a, b, p), 1.0, limit, xtol=1e-14))
        if best == 1.0:
            break

    logger.debug(f"max_lp_exponent({space!r}) = {best}")
    return best


def lp_exponent_lower_bound(
    space: FiniteMetricSpace, alpha: Optional[float] = None, bracket_max: Optional[float] = None
) -> float:
    """
    Constructive exponent p > 1 with d**p a metric, derived from an SRA parameter.

    For each triple with sides c <= b <= a the SRA(alpha) inequality gives
    a <= b + alpha*c, and p_t is the root of 1 + x**p = (x + alpha)**p with
    x = b/c (log 2 / log(1 + alpha) when b = c). The minimum over triples is a
    valid exponent, hence never above max_lp_exponent.

    Args:
        space: Space satisfying SRA(alpha)
        alpha: SRA parameter in [0, 1); defaults to the space's required value
        bracket_max: Exponents beyond this are reported as infinity

    Raises:
        DomainError: If alpha is not below 1 or the space violates SRA(alpha)
    """
    from ..sra.analysis import sra_required_alpha

    upper = get_settings().numerics.lp_bracket_max if bracket_max is None else bracket_max
    required = sra_required_alpha(space).required_alpha
    alpha = required if alpha is None else alpha
    if not 0 <= alpha < 1:
        raise DomainError(f"SRA parameter must lie in [0, 1), got {alpha}")
    if required > alpha + get_settings().numerics.feasibility_tolerance:
        raise DomainError(f"Space needs SRA({required:.6g}), above the given {alpha}")
    if alpha == 0:
        return math.inf

    d = space.matrix
    best = math.inf
    equal_sides = math.log(2.0) / math.log1p(alpha)

    for i, jj, kk in iter_triple_blocks(space.n):
        _, b, c = _sorted_sides(d, i, jj, kk)
        for b_t, c_t in zip(b.tolist(), c.tolist()):
            if c_t <= 0:
                continue
            if b_t == c_t:
                best = min(best, equal_sides)
                continue
            x = b_t / c_t
            # 1 + x**p - (x + alpha)**p, divided through by (x + alpha)**p
            r1, r2 = 1.0 / (x + alpha), x / (x + alpha)
            limit = min(best, upper)
            if _lp_residual(r1, r2, limit) >= 0:
                continue
            best = float(
                bisect(lambda p, r1=r1, r2=r2: _lp_residual(r1, r2, p), 1.0, limit, xtol=1e-14)
            )
    return best


def comparison_angles(space: FiniteMetricSpace, triple: Sequence[int]) -> ComparisonAngles:
    """
    Angles of the planar triangle with the triple's side lengths.

    Degenerate (collinear) triples return pi at the middle point and 0 elsewhere,
    flagged rather than raised.
    """
    if len(triple) != 3 or len(set(triple)) != 3:
        raise DomainError(f"Comparison angles need three distinct points, got {list(triple)}")
    i, j, k = (int(v) for v in triple)
    d = space.matrix
    a, b, c = d[j, k], d[i, k], d[i, j]  # sides opposite i, j, k

    sides = sorted([(a, 0), (b, 1), (c, 2)])
    hi, mid, lo = sides[2][0], sides[1][0], sides[0][0]
    tol = get_settings().numerics.tolerance * hi
    if hi >= mid + lo - tol:
        angles = [0.0, 0.0, 0.0]
        angles[sides[2][1]] = math.pi
        return ComparisonAngles(triple=[i, j, k], angles=angles, degenerate=True)

    def angle(opposite: float, s1: float, s2: float) -> float:
        cosine = (s1 * s1 + s2 * s2 - opposite * opposite) / (2.0 * s1 * s2)
        return math.acos(min(1.0, max(-1.0, cosine)))

    angles = [angle(a, b, c), angle(b, a, c), angle(c, a, b)]
    return ComparisonAngles(triple=[i, j, k], angles=angles, degenerate=False)


def doubling_probe(
    space: FiniteMetricSpace, radius_grid: Sequence[float], tol: Optional[float] = None
) -> DoublingProbe:
    """
    Largest greedy r/2-separated subset of a closed ball B(x, r) over centers and radii.

    Separation is closed (pairwise distance >= r/2). The count is a lower bound for
    the doubling constant.

    Raises:
        DomainError: If the radius grid is empty or contains a nonpositive radius
    """
    if not radius_grid:
        raise DomainError("Radius grid must not be empty")
    if any(r <= 0 for r in radius_grid):
        raise DomainError("Radii must be positive")
    tol = get_settings().numerics.tolerance if tol is None else tol

    d = space.matrix
    best = DoublingProbe(count=0, center=0, radius=float(radius_grid[0]))
    for r in radius_grid:
        for x in range(space.n):
            ball = np.flatnonzero(d[x] <= r + tol)
            chosen: list[int] = []
            for y in ball:
                if all(d[y, z] >= r / 2 - tol for z in chosen):
                    chosen.append(int(y))
            if len(chosen) > best.count:
                best = DoublingProbe(count=len(chosen), center=x, radius=float(r))
    return best
