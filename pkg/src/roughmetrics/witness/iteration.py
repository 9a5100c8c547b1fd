"""
Index-set iteration towards a medial ordered SRA(theta) subset.

Starting from the first m positions, each step either finds that the current
m-point subset is medial SRA(theta) or picks a violating triple (i, j, k),
drops the d_t current positions in [j, k) and appends the next d_t positions
after the last one. The iteration ends when no positions are left to append.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from itertools import combinations
from pathlib import Path
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from ..core.config import get_settings
from ..core.errors import DomainError
from ..core.models import (
    LemmaCheck,
    LemmaStep,
    LengthBound,
    WitnessOutcome,
    WitnessStep,
    WitnessTrace,
)
from ..ordered.ordered_set import (
    OrderedSet,
    discrete_diameter,
    discrete_length,
    lambda_required_expanding,
)
from .constants import proof_constants, rho

logger = logging.getLogger(__name__)


def weighted_sum(s: OrderedSet, positions: Sequence[int], weight: float) -> float:
    """
    Sum over a < b of weight**(m-1-a) d(x_(p_a), x_(p_b)) with a counted from 1.

    Raises:
        DomainError: If the positions are not strictly increasing or out of range
    """
    p = np.asarray(positions, dtype=np.intp)
    if p.size and (p[0] < 0 or p[-1] >= s.size or np.any(np.diff(p) <= 0)):
        raise DomainError("Index set must be strictly increasing positions of the ordered set")
    m = p.size
    d = s.matrix
    total = 0.0
    for a in range(m - 1):
        total += weight ** (m - 2 - a) * float(d[p[a], p[a + 1 :]].sum())
    return total


def _violation(
    d: NDArray[np.float64], p: NDArray[np.intp], triples: NDArray[np.intp], theta: float, tol: float
) -> Optional[tuple[int, int, int]]:
    """Violating triple of largest residual (first on ties), None when p is medial."""
    i, j, k = p[triples[:, 0]], p[triples[:, 1]], p[triples[:, 2]]
    d_ik, d_ij, d_jk = d[i, k], d[i, j], d[j, k]
    violating = (d_ik - d_ij) / d_jk > theta + tol
    if not np.any(violating):
        return None
    residual = np.where(violating, d_ik - d_ij - theta * d_jk, -np.inf)
    best = int(np.argmax(residual))
    return int(i[best]), int(j[best]), int(k[best])


def pt_iteration(
    s: OrderedSet, theta: float, m: int, tol: Optional[float] = None
) -> WitnessTrace:
    """
    Run the index-set iteration on an ordered set.

    Positions are 0-based. Among violating triples the one maximizing
    d(x_i, x_k) - d(x_i, x_j) - theta d(x_j, x_k) is chosen, ties going to the
    lexicographically first triple.

    Args:
        s: Ordered set with at least m points
        theta: Medial parameter in (0, 1)
        m: Size of the index sets, at least 3
        tol: Slack on the medial kernel comparison

    Returns:
        A trace ending either in a medial subset or in termination
    """
    tol = get_settings().numerics.tolerance if tol is None else tol
    if m < 3:
        raise DomainError(f"Index sets need at least three points, got m={m}")
    n = s.size
    if n < m:
        raise DomainError(f"Ordered set has {n} points, fewer than m={m}")
    weight = rho(theta, m)

    d = s.matrix
    triples = np.array(list(combinations(range(m), 3)), dtype=np.intp)
    p = np.arange(m)
    trace = WitnessTrace(n=n, theta=theta, m=m, rho=weight, outcome=WitnessOutcome.TERMINATED)

    t = 1
    while True:
        indices = p.tolist()
        current = weighted_sum(s, indices, weight)
        triple = _violation(d, p, triples, theta, tol)
        if triple is None:
            trace.steps.append(WitnessStep(t=t, indices=indices, weighted_sum=current))
            trace.outcome = WitnessOutcome.MEDIAL_SUBSET
            trace.medial_subset = indices
            break

        _, j, k = triple
        removed = (p >= j) & (p < k)
        d_t = int(np.count_nonzero(removed))
        trace.steps.append(
            WitnessStep(t=t, indices=indices, triple=list(triple), d_t=d_t, weighted_sum=current)
        )
        last = int(p[-1])
        if last + d_t >= n:
            break
        p = np.concatenate([p[~removed], np.arange(last + 1, last + d_t + 1)])
        t += 1

    logger.info(
        f"pt_iteration(theta={theta}, m={m}) on {n} points: {trace.outcome} "
        f"after {len(trace.steps)} step(s)"
    )
    return trace


def save_trace_jsonl(trace: WitnessTrace, path: Path) -> None:
    """Write one JSON object per step."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        for step in trace.steps:
            f.write(step.model_dump_json() + "\n")


def lemma_step_check(
    trace: WitnessTrace, s: OrderedSet, lam: float, tol: Optional[float] = None
) -> LemmaCheck:
    """
    Evaluate the weighted-sum step inequality on every consecutive pair of steps.

    S_t <= S_(t+1) - (length of the path from p_m^t to p_m^(t+1))
            + C1 max(lambda, 0) sum_b d(x_(p_b^t), x_(p_b^(t+1)))

    Failures and unmet preconditions (the set must be rough lambda-self-expanding)
    are reported, never raised.
    """
    tol = get_settings().witness.lemma_tolerance if tol is None else tol
    _, c1, _, _ = proof_constants(trace.theta, trace.m)
    expanding = lambda_required_expanding(s)
    met = expanding <= lam + get_settings().numerics.tolerance
    if not met:
        logger.warning(f"Ordered set is rough {expanding:.6g}-self-expanding, not {lam}")

    d = s.matrix
    lam_eff = max(lam, 0.0)
    check = LemmaCheck(lam=lam, preconditions_met=met, lambda_expanding=expanding)
    for before, after in zip(trace.steps, trace.steps[1:]):
        p, q = np.asarray(before.indices), np.asarray(after.indices)
        path = np.arange(p[-1], q[-1])
        travelled = float(d[path, path + 1].sum())
        drift = float(d[p, q].sum())
        lhs = before.weighted_sum
        rhs = after.weighted_sum - travelled + c1 * lam_eff * drift
        residual = lhs - rhs
        holds = residual <= tol * max(1.0, abs(lhs))
        if not holds:
            logger.warning(f"Step inequality fails at t={before.t} by {residual:.3g}")
        check.steps.append(LemmaStep(t=before.t, holds=holds, lhs=lhs, rhs=rhs, residual=residual))
    return check


def termination_bound_check(s: OrderedSet, theta: float, m: int) -> LengthBound:
    """Compare L(S) with C(theta, m) D(S)."""
    _, _, _, big_c = proof_constants(theta, m)
    length = discrete_length(s)
    diameter = discrete_diameter(s)
    holds = length <= big_c * diameter * (1.0 + 1e-12)
    return LengthBound(length=length, diameter=diameter, big_c=big_c, holds=holds)
