"""Build spaces from construction specs."""

from __future__ import annotations

import logging
from collections.abc import Callable
from typing import Any

from ..core.errors import SpaceFormatError
from ..core.models import ConstructionFamily, ConstructionSpec
from ..metric.space import FiniteMetricSpace
from .counterexamples import (
    dyadic_doubling_space,
    hilbert_triangles,
    no_converse_family,
    simplex_with_center,
)
from .laakso import laakso_doubled, laakso_level
from .sequences import cantor_approx, geometric_sra_sequence
from .trees import heisenberg_axis, hilbert_sequence, metric_tree

logger = logging.getLogger(__name__)


def _laakso(m: int, doubled: bool = False, **kwargs: Any) -> FiniteMetricSpace:
    if doubled:
        return laakso_doubled(m, **kwargs)
    if kwargs:
        raise TypeError(f"unexpected parameters {sorted(kwargs)}")
    return laakso_level(m)


BUILDERS: dict[ConstructionFamily, Callable[..., FiniteMetricSpace]] = {
    ConstructionFamily.GEOMETRIC_SRA_SEQUENCE: geometric_sra_sequence,
    ConstructionFamily.CANTOR_APPROX: cantor_approx,
    ConstructionFamily.LAAKSO_LEVEL: _laakso,
    ConstructionFamily.METRIC_TREE: metric_tree,
    ConstructionFamily.HILBERT_SEQUENCE: hilbert_sequence,
    ConstructionFamily.HEISENBERG_AXIS: heisenberg_axis,
    ConstructionFamily.NO_CONVERSE: no_converse_family,
    ConstructionFamily.DYADIC_DOUBLING: dyadic_doubling_space,
    ConstructionFamily.HILBERT_TRIANGLES: hilbert_triangles,
    ConstructionFamily.SIMPLEX_WITH_CENTER: simplex_with_center,
}


def build_space(spec: ConstructionSpec) -> FiniteMetricSpace:
    """
    Dispatch a construction spec to its builder.

    Raises:
        SpaceFormatError: If the family is unknown or the parameters do not fit its builder
        DomainError: If a parameter is outside the family's domain
    """
    try:
        family = ConstructionFamily(spec.family)
    except ValueError as e:
        raise SpaceFormatError(f"Unknown construction family: {spec.family}", "family") from e

    builder = BUILDERS[family]
    logger.debug(f"Building {family.value} with {spec.params}")
    try:
        space = builder(**spec.params)
    except TypeError as e:
        raise SpaceFormatError(f"Bad parameters for {family.value}: {e}", "params") from e

    space.construction = ConstructionSpec(family=family, params=dict(spec.params), seed=spec.seed)
    return space
