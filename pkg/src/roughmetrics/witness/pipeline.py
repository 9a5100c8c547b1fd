"""
End-to-end extraction of an SRA(alpha) K-subset from an ordered set.

Stages:
1. orient the set so that it is rough lambda0-self-expanding
2. find a medial SRA(theta) subset with the index iteration (or a direct search)
3. color its triples and look for a red K-clique or a blue p-clique
4. certify a red clique by brute force; re-check a blue clique with the
   decay-index test
5. fall back to a direct SRA(alpha) subset search, reported as a diagnostic
   rather than a witness
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ..core.config import get_settings
from ..core.errors import DomainError, PreconditionError
from ..core.models import (
    CliqueColor,
    ConstantsBundle,
    ExtractionMethod,
    ExtractionResult,
    LengthBound,
    Prop2Result,
    Prop2Status,
    WitnessOutcome,
)
from ..ordered.ordered_set import (
    OrderedSet,
    bounded_turning_constant,
    lambda_required_contracting,
    lambda_required_expanding,
    medial_theta_required,
)
from ..search.engine import HypercliqueSearch, max_sra_subset
from ..sra.analysis import sra_check
from ..utils.logging import stage_timer
from .constants import constants, decay_premise, m_star, p_bound, theta_from_alpha
from .iteration import pt_iteration, termination_bound_check
from .ramsey import color_triples, mono_clique_search

logger = logging.getLogger(__name__)


def prop2_check(z: OrderedSet, theta: float, big_m: float, alpha: float) -> Prop2Result:
    """
    Look for a decay index on a bounded turning medial ordered set.

    On the first p points z_0..z_(p-1) an index i in [0, p-3] with
    d(z_(i+1), z_(p-1)) < d(z_i, z_(p-1)) + alpha d(z_i, z_(i+1)) must exist when
    Z is M-bounded turning, medial SRA(theta) and alpha exceeds the premise
    value. Smaller sets only get a size report. Nothing is raised: failed
    hypotheses are reported with status ``precondition_failed``.
    """
    tol = get_settings().numerics.tolerance
    if not 0 < theta < 1:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    if big_m < 1:
        raise DomainError(f"Bounded turning constant must be at least 1, got {big_m}")

    size = z.size
    medial = medial_theta_required(z)
    turning = bounded_turning_constant(z) if size >= 2 else 1.0
    premise = alpha > decay_premise(theta, big_m)
    p = p_bound(theta, big_m, alpha) if premise else None

    def result(status: Prop2Status, index: Optional[int] = None) -> Prop2Result:
        return Prop2Result(
            status=status,
            p=p,
            size=size,
            index=index,
            medial_theta=medial,
            bounded_turning=turning,
            premise_holds=premise,
        )

    if not premise or medial > theta + tol or turning > big_m + tol:
        return result(Prop2Status.PRECONDITION_FAILED)
    assert p is not None
    if size < p:
        return result(Prop2Status.SIZE_REPORT)

    d = z.matrix
    last = p - 1
    for i in range(p - 2):
        if d[i + 1, last] < d[i, last] + alpha * d[i, i + 1]:
            return result(Prop2Status.INDEX_FOUND, i)

    logger.error(f"No decay index on a set meeting every hypothesis (p={p})")
    return result(Prop2Status.NO_INDEX)


def _orient(s: OrderedSet, lam0: float) -> tuple[OrderedSet, bool]:
    tol = get_settings().numerics.feasibility_tolerance
    expanding = lambda_required_expanding(s)
    if expanding <= lam0 + tol:
        return s, False
    contracting = lambda_required_contracting(s)
    if contracting <= lam0 + tol:
        logger.info("Input is rough self-contracting; reversing it")
        return s.reversed(), True
    raise PreconditionError(
        f"Ordered set is neither rough {lam0:.3g}-self-expanding nor self-contracting",
        {"lambda_expanding": expanding, "lambda_contracting": contracting, "lambda0": lam0},
    )


def _medial_search(s: OrderedSet, theta: float, size: int, budget: int) -> Optional[list[int]]:
    """Direct search for a medial SRA(theta) subset of the given size."""
    tol = get_settings().numerics.tolerance
    n = s.size
    if n > get_settings().search.max_dense_points:
        return None
    d = s.matrix
    lo, mid, hi = np.sort(np.stack(np.meshgrid(*(np.arange(n),) * 3, indexing="ij")), axis=0)
    d_ik, d_ij, d_jk = d[lo, hi], d[lo, mid], d[mid, hi]
    with np.errstate(divide="ignore", invalid="ignore"):
        medial = (lo == mid) | (mid == hi) | ((d_ik - d_ij) / d_jk <= theta + tol)
    search = HypercliqueSearch(medial, budget, target=size)
    best = search.run([], np.arange(n))
    return best[:size] if len(best) >= size else None


class _Extraction:
    """Mutable state of one extraction run."""

    def __init__(self, s: OrderedSet, alpha: float, k: int, budget: int) -> None:
        self.s = s
        self.alpha = alpha
        self.k = k
        self.budget = budget
        self.stages: list[str] = []
        self.blue: Optional[list[int]] = None
        self.artifact = False

    def note(self, message: str) -> None:
        logger.info(message)
        self.stages.append(message)

    def try_medial(
        self, work: OrderedSet, medial: list[int], theta: float, bundle: ConstantsBundle
    ) -> Optional[list[int]]:
        """Color a medial subset and return a certified red K-clique (work positions)."""
        assert bundle.p is not None and bundle.m_star is not None
        f = work.subset(medial)
        coloring = color_triples(f, self.alpha)
        clique = mono_clique_search(coloring, self.k, bundle.p, self.budget)
        self.note(
            f"medial subset of size {len(medial)}: red fraction {coloring.red_fraction:.3f}, "
            f"clique outcome {clique.color}"
        )

        if clique.color == CliqueColor.RED:
            candidate = [medial[i] for i in clique.subset]
            if sra_check(work.points.restrict(candidate), self.alpha).passed:
                return candidate
            logger.error(f"Red clique {candidate} fails SRA({self.alpha})")
            self.note(f"red clique {candidate} failed certification")
        elif clique.color == CliqueColor.BLUE:
            blue = [medial[i] for i in clique.subset]
            self.blue = blue
            check = prop2_check(work.subset(blue), theta, bundle.m_star, self.alpha)
            self.note(f"blue clique {blue}: decay check {check.status}")
            if check.status == Prop2Status.NO_INDEX:
                self.artifact = True
        return None


def extract_sra_subset(
    s: OrderedSet,
    alpha: float,
    k: int,
    budget: Optional[int] = None,
    ramsey_c: Optional[float] = None,
) -> ExtractionResult:
    """
    Find a K-point subset of an ordered set satisfying SRA(alpha).

    Args:
        s: Ordered set, rough lambda0-self-expanding (or self-contracting, in
            which case it is reversed first)
        alpha: SRA parameter in (1/2, 1)
        k: Requested subset size
        budget: Node limit for each clique or subset search
        ramsey_c: Constant of the informational Ramsey bound

    Returns:
        The subset in input positions, certified by brute force, or a
        ``not_found`` result whose stages explain what failed

    Raises:
        DomainError: If alpha or K is out of range
        PreconditionError: If the set is not roughly self-monotone enough
    """
    if not 0.5 < alpha < 1:
        raise DomainError(f"alpha must lie in (1/2, 1), got {alpha}")
    if k < 1:
        raise DomainError(f"K must be positive, got {k}")
    budget = get_settings().search.budget if budget is None else budget
    n = s.size

    if k <= 2:
        subset = list(range(min(k, n)))
        return ExtractionResult(
            alpha=alpha,
            k=k,
            subset=subset if len(subset) == k else None,
            certified=len(subset) == k,
            method=ExtractionMethod.TRIVIAL if len(subset) == k else ExtractionMethod.NOT_FOUND,
            witness=len(subset) == k,
        )

    theta = theta_from_alpha(alpha)
    p = p_bound(theta, m_star(alpha), alpha)
    m0 = max(k, p)
    bundle = constants(theta, m0, alpha, k, ramsey_c)
    assert bundle.lambda0 is not None
    work, reversed_input = _orient(s, bundle.lambda0)

    run = _Extraction(work, alpha, k, budget)
    run.note(f"theta={theta:.6g}, p={p}, m={m0}, lambda0={bundle.lambda0:.3g}")
    found: Optional[list[int]] = None
    method = ExtractionMethod.NOT_FOUND
    medial_used: Optional[list[int]] = None
    length_bound: Optional[LengthBound] = None

    for m in range(m0, n + 1):
        with stage_timer(logger, f"iteration m={m}"):
            trace = pt_iteration(work, theta, m)
        if trace.outcome != WitnessOutcome.MEDIAL_SUBSET:
            run.note(f"iteration with m={m} terminated after {len(trace.steps)} step(s)")
            length_bound = termination_bound_check(work, theta, m)
            run.note(
                f"L/D = {length_bound.length / length_bound.diameter:.4g} against C = "
                f"{length_bound.big_c:.4g}: "
                + ("no witness is guaranteed" if length_bound.holds else "length bound violated")
            )
            if not length_bound.holds:
                logger.error(f"Terminated with L > C D on {n} points (m={m})")
            break
        assert trace.medial_subset is not None
        medial_used = trace.medial_subset
        found = run.try_medial(work, trace.medial_subset, theta, bundle)
        if found is not None:
            method = ExtractionMethod.RED_CLIQUE
            break
    else:
        if n < m0:
            run.note(f"only {n} points, fewer than m={m0}")

    if found is None and n >= m0:
        with stage_timer(logger, f"medial search size={m0}"):
            medial = _medial_search(work, theta, m0, budget)
        if medial is None:
            run.note(f"no medial SRA({theta:.3g}) subset of size {m0}")
        elif medial != medial_used:
            medial_used = medial
            found = run.try_medial(work, medial, theta, bundle)
            if found is not None:
                method = ExtractionMethod.RED_CLIQUE

    if found is None:
        with stage_timer(logger, "direct search"):
            direct = max_sra_subset(work.points, alpha, budget=budget, target=k)
        if direct.cardinality >= k:
            found = direct.subset[:k]
            method = ExtractionMethod.DIRECT_SEARCH
            run.note(
                f"direct search found {found} after {direct.nodes_explored} nodes; "
                "diagnostic only, outside the witness route"
            )
        else:
            run.note(
                f"direct search found at most {direct.cardinality} points "
                f"(optimal={direct.proved_optimal})"
            )

    def to_input(positions: Optional[list[int]]) -> Optional[list[int]]:
        if positions is None:
            return None
        return sorted(n - 1 - q for q in positions) if reversed_input else sorted(positions)

    certified = False
    if found is not None:
        certified = sra_check(work.points.restrict(found), alpha).passed

    result = ExtractionResult(
        alpha=alpha,
        k=k,
        subset=to_input(found),
        certified=certified,
        method=method,
        witness=certified and method in (ExtractionMethod.TRIVIAL, ExtractionMethod.RED_CLIQUE),
        reversed_input=reversed_input,
        constants=bundle,
        medial_subset=to_input(medial_used),
        blue_clique=to_input(run.blue),
        falsification_artifact=run.artifact,
        length_bound=length_bound,
        stages=run.stages,
    )
    logger.info(f"extract_sra_subset(alpha={alpha}, K={k}): {result.method} {result.subset}")
    return result
