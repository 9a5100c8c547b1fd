"""Required SRA parameter, ultrametric test and UNC feasibility."""

from __future__ import annotations

import csv
import io
import logging
import math
from pathlib import Path
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from ..core.config import get_settings
from ..core.errors import DomainError
from ..core.models import EfBounds, SraCheck, SraReport, TripleRow, UncPair, UncReport
from ..metric.space import FiniteMetricSpace, iter_triple_blocks

logger = logging.getLogger(__name__)

UNC_GAP_TOLERANCE = 1e-12
MAX_BINARY_EXPONENT = 1023.0


def _block_kernel(
    d: NDArray[np.float64], i: int, jj: NDArray[np.intp], kk: NDArray[np.intp]
) -> tuple[NDArray[np.float64], NDArray[np.intp]]:
    """
    Required alpha of every triple (i, j, k) in a block, plus the position of its longest side.

    Side positions: 0 is (i, j), 1 is (j, k), 2 is (i, k). The kernel is
    max(0, (hi - mid) / lo), the closed form of max{A + aB, aA + B} >= C.
    """
    sides = np.stack([d[i, jj], d[jj, kk], d[i, kk]], axis=1)
    order = np.argsort(sides, axis=1, kind="stable")
    ranked = np.take_along_axis(sides, order, axis=1)
    lo, mid, hi = ranked[:, 0], ranked[:, 1], ranked[:, 2]
    excess = hi - mid
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = np.where(lo > 0, excess / lo, np.where(excess > 0, np.inf, 0.0))
    return np.maximum(kernel, 0.0), order[:, 2]


def _roles(i: int, j: int, k: int, longest: int) -> list[int]:
    """Endpoints of the longest side first, then the middle point."""
    if longest == 0:
        return [i, j, k]
    if longest == 1:
        return [j, k, i]
    return [i, k, j]


def sra_required_alpha(space: FiniteMetricSpace, with_table: bool = False) -> SraReport:
    """
    Minimal alpha >= 0 such that the space satisfies SRA(alpha).

    Args:
        space: Space with at least two points
        with_table: Also return the per-triple table (i, j, k, required_alpha)

    Returns:
        SraReport; required_alpha is 0 for spaces with at most two points
    """
    d = space.matrix
    best = -1.0
    argmax: Optional[list[int]] = None
    table: Optional[list[TripleRow]] = [] if with_table else None

    for i, jj, kk in iter_triple_blocks(space.n):
        kernel, longest = _block_kernel(d, i, jj, kk)
        if table is not None:
            table.extend(
                TripleRow(i=i, j=int(j), k=int(k), required_alpha=float(v))
                for j, k, v in zip(jj, kk, kernel)
            )
        if not kernel.size:
            continue
        idx = int(np.argmax(kernel))
        if kernel[idx] > best:
            best = float(kernel[idx])
            argmax = _roles(i, int(jj[idx]), int(kk[idx]), int(longest[idx]))

    best = max(best, 0.0)

    logger.debug(f"sra_required_alpha({space!r}) = {best}")
    return SraReport(required_alpha=best, argmax_triple=argmax, per_triple_table=table)


def sra_check(space: FiniteMetricSpace, alpha: float, tol: Optional[float] = None) -> SraCheck:
    """
    Decide SRA(alpha) by brute force over all triples.

    The reported violating triple is the lexicographically first one (as endpoints
    then middle point).
    """
    tol = get_settings().numerics.tolerance if tol is None else tol
    d = space.matrix
    required = 0.0
    first: Optional[list[int]] = None

    for i, jj, kk in iter_triple_blocks(space.n):
        kernel, longest = _block_kernel(d, i, jj, kk)
        if kernel.size:
            required = max(required, float(kernel.max()))
        if first is None:
            bad = np.flatnonzero(kernel > alpha + tol)
            if bad.size:
                idx = int(bad[0])
                first = _roles(i, int(jj[idx]), int(kk[idx]), int(longest[idx]))

    return SraCheck(
        alpha=alpha, passed=first is None, required_alpha=required, violating_triple=first
    )


def is_ultrametric(space: FiniteMetricSpace, tol: Optional[float] = None) -> bool:
    """SRA(0): every triangle is acute isosceles."""
    return sra_check(space, 0.0, tol=tol).passed


def unc_check(space: FiniteMetricSpace, delta: float) -> UncReport:
    """
    Check delta-uniform non-convexity with closed balls.

    For a pair (x, y) with C = d(x, y), each third point z blocks the closed
    interval [d(x,z)/C - delta, 1 + delta - d(y,z)/C] of parameters. The pair
    passes when the open window (delta, 1 - delta) is not covered; the witness is
    the midpoint of the largest free gap (first one on ties).

    Raises:
        DomainError: If delta is outside (0, 1/2)
    """
    if not 0 < delta < 0.5:
        raise DomainError(f"UNC delta must lie in (0, 1/2), got {delta}")

    d = space.matrix
    n = space.n
    low_end, high_end = delta, 1.0 - delta
    pairs: list[UncPair] = []

    for x in range(n):
        for y in range(x + 1, n):
            c = d[x, y]
            others = np.array([z for z in range(n) if z not in (x, y)], dtype=int)
            starts = d[x, others] / c - delta
            ends = 1.0 + delta - d[y, others] / c
            keep = (starts <= ends) & (ends >= low_end) & (starts <= high_end)
            intervals = sorted(
                (max(s, low_end), min(e, high_end)) for s, e in zip(starts[keep], ends[keep])
            )

            merged: list[list[float]] = []
            for s, e in intervals:
                if merged and s <= merged[-1][1]:
                    merged[-1][1] = max(merged[-1][1], e)
                else:
                    merged.append([float(s), float(e)])

            cursor = low_end
            best_gap: Optional[tuple[float, float]] = None
            for s, e in [*merged, [high_end, high_end]]:
                if s - cursor > UNC_GAP_TOLERANCE and (
                    best_gap is None or s - cursor > best_gap[1] - best_gap[0]
                ):
                    best_gap = (cursor, s)
                cursor = max(cursor, e)

            lam = None if best_gap is None else (best_gap[0] + best_gap[1]) / 2.0
            pairs.append(
                UncPair(x=x, y=y, feasible=lam is not None, lam=lam, blocking=merged)
            )

    passed = all(pair.feasible for pair in pairs)
    logger.debug(f"unc_check({space!r}, delta={delta}): passed={passed}")
    return UncReport(delta=delta, passed=passed, pairs=pairs)


def sra_triple_table(space: FiniteMetricSpace) -> list[TripleRow]:
    """Required alpha of every unordered triple, in lexicographic order."""
    report = sra_required_alpha(space, with_table=True)
    assert report.per_triple_table is not None
    return report.per_triple_table


def triple_table_csv(rows: list[TripleRow]) -> str:
    """Per-triple table as CSV text with header i,j,k,required_alpha."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["i", "j", "k", "required_alpha"])
    for row in rows:
        writer.writerow([row.i, row.j, row.k, repr(row.required_alpha)])
    return buffer.getvalue()


def save_triple_table_csv(rows: list[TripleRow], path: Path) -> None:
    """Write a per-triple table as CSV."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(triple_table_csv(rows), encoding="utf-8")


# --------------------------------------------------------------- closed forms


def _unit_interval(name: str, value: float) -> None:
    if not 0 <= value <= 1:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def snowflake_sra_parameter(alpha: float) -> float:
    """SRA parameter 2**alpha - 1 satisfied by every alpha-snowflake."""
    _unit_interval("Snowflake exponent", alpha)
    return float(2.0**alpha - 1.0)


def unc_delta_from_sra(alpha: float) -> float:
    """
    UNC parameter guaranteed by SRA(alpha): (1 - alpha) / (2 (1 + alpha)).

    The endpoints return their limits, 1/2 at alpha = 0 and 0 at alpha = 1,
    which are outside the open UNC range.
    """
    _unit_interval("SRA parameter", alpha)
    return 0.5 * (1.0 - alpha) / (1.0 + alpha)


def snowflake_exponent_q(alpha: float) -> float:
    """Exponent q with SRA(alpha) spaces being q-snowflakes; infinite at alpha = 0."""
    _unit_interval("SRA parameter", alpha)
    if alpha == 0:
        return math.inf
    return math.log(2.0) / math.log1p(2.0 * alpha / (1.0 + alpha * alpha))


def tw_exponent_q(delta: float) -> float:
    """Snowflake exponent of a delta-UNC space; infinite at delta = 1/2."""
    if not 0 <= delta <= 0.5:
        raise DomainError(f"UNC delta must lie in [0, 1/2], got {delta}")
    denominator = math.log(2.0) - math.log1p(4.0 * delta * delta)
    if denominator <= 0:
        return math.inf
    return math.log(2.0) / denominator


def max_comparison_angle_bound(alpha: float) -> float:
    """Largest comparison angle allowed in an SRA(alpha) space: pi - arccos(alpha)."""
    _unit_interval("SRA parameter", alpha)
    return math.pi - math.acos(alpha)


def hausdorff_dimension_cantor(a: float) -> float:
    """Similarity dimension log 2 / log(1/a) of the two-map Cantor set with ratio a."""
    if not 0 < a < 0.5:
        raise DomainError(f"Cantor ratio must lie in (0, 1/2), got {a}")
    return math.log(2.0) / -math.log(a)


def ef_bounds(n: int, alpha: float) -> EfBounds:
    """
    Lower and upper cardinality bounds for SRA(alpha) subsets of R^n.

    Both bounds are powers of two with exponents (pi / arccos alpha)**(n-1) and
    (4 pi / arccos alpha)**(n-1). Values past double range saturate to infinity
    with the overflow flag set; the exponents are always reported.

    Raises:
        DomainError: If n < 1 or alpha is outside [0, 1)
    """
    if n < 1:
        raise DomainError(f"Dimension must be at least 1, got {n}")
    if not 0 <= alpha < 1:
        raise DomainError(f"SRA parameter must lie in [0, 1), got {alpha}")

    opening = math.acos(alpha)
    lower_exponent = (math.pi / opening) ** (n - 1)
    upper_exponent = (4.0 * math.pi / opening) ** (n - 1)

    def power(exponent: float) -> float:
        return math.inf if exponent > MAX_BINARY_EXPONENT else float(2.0**exponent)

    lower, upper = power(lower_exponent), power(upper_exponent)
    return EfBounds(
        n=n,
        alpha=alpha,
        lower=lower,
        upper=upper,
        lower_exponent=lower_exponent,
        upper_exponent=upper_exponent,
        overflow=math.isinf(upper),
    )
