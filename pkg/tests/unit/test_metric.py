"""Tests for finite metric spaces and their analysis."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roughmetrics.core.errors import DomainError, StructuralError
from roughmetrics.core.models import SpaceKind, ViolationKind
from roughmetrics.metric.analysis import (
    comparison_angles,
    doubling_probe,
    lp_exponent_lower_bound,
    max_lp_exponent,
    snowflake,
    validate,
)
from roughmetrics.metric.space import FiniteMetricSpace, iter_triple_blocks
from tests.strategies import point_clouds


@pytest.fixture
def bad_triangle():
    """Three points whose distances (1, 1, 3) break the triangle inequality."""
    return FiniteMetricSpace.from_matrix([[0, 1, 3], [1, 0, 1], [3, 1, 0]])


def test_structural_errors():
    """Malformed matrices are rejected before any metric check."""
    with pytest.raises(StructuralError):
        FiniteMetricSpace.from_matrix([[0, 1], [1, 0], [1, 1]])
    with pytest.raises(StructuralError):
        FiniteMetricSpace.from_matrix([[0, -1], [-1, 0]])
    with pytest.raises(StructuralError):
        FiniteMetricSpace.from_matrix([[0, float("nan")], [1, 0]])
    with pytest.raises(StructuralError):
        FiniteMetricSpace.from_matrix([[0, 1], [1, 0]], labels=["a", "a"])


def test_matrix_is_read_only(line3):
    """Cached distances cannot be mutated in place."""
    with pytest.raises(ValueError):
        line3.matrix[0, 1] = 5.0


def test_triple_blocks_cover_each_triple_once():
    """Every unordered triple appears once, in lexicographic order."""
    triples = [
        (i, int(j), int(k)) for i, jj, kk in iter_triple_blocks(6) for j, k in zip(jj, kk)
    ]
    assert len(triples) == math.comb(6, 3)
    assert triples == sorted(triples)
    assert all(i < j < k for i, j, k in triples)


def test_validate_equilateral(equilateral):
    """An equilateral triangle is a metric."""
    report = validate(equilateral)
    assert report.passed
    assert report.violations == []


def test_validate_triangle_violation(bad_triangle):
    """Distances (1, 1, 3) fail the triangle inequality by 1."""
    report = validate(bad_triangle)
    assert not report.passed
    triangle = [v for v in report.violations if v.kind == ViolationKind.TRIANGLE]
    assert triangle
    assert max(v.residual for v in triangle) == pytest.approx(1.0)
    assert "violation" in report.format_report()


def test_validate_symmetry_and_identity():
    """Asymmetric entries and a nonzero diagonal are both reported."""
    space = FiniteMetricSpace.from_matrix([[0.5, 1.0], [2.0, 0.0]])
    kinds = {v.kind for v in validate(space).violations}
    assert ViolationKind.SYMMETRY in kinds
    assert ViolationKind.IDENTITY in kinds


def test_validate_positivity():
    """Two labels at distance zero violate positivity."""
    space = FiniteMetricSpace.from_matrix([[0, 0], [0, 0]])
    report = validate(space)
    assert [v.kind for v in report.violations] == [ViolationKind.POSITIVITY]


def test_validate_negative_tolerance(equilateral):
    """Tolerances must be nonnegative."""
    with pytest.raises(DomainError):
        validate(equilateral, tol=-1.0)


def test_snowflake_distances(line3):
    """Snowflaking {0,1,2} with 1/2 gives sides (1, 1, sqrt 2)."""
    flake = snowflake(line3, 0.5)
    assert flake.kind is SpaceKind.SNOWFLAKE
    assert flake.distance(0, 1) == pytest.approx(1.0)
    assert flake.distance(1, 2) == pytest.approx(1.0)
    assert flake.distance(0, 2) == pytest.approx(math.sqrt(2.0))
    assert validate(flake).passed


def test_snowflake_identity_and_composition(line3):
    """Exponent 1 is the identity; two halvings equal one quartering."""
    assert np.array_equal(snowflake(line3, 1.0).matrix, line3.matrix)
    twice = snowflake(snowflake(line3, 0.5), 0.5)
    once = snowflake(line3, 0.25)
    assert twice.base is line3
    assert np.allclose(twice.matrix, once.matrix, rtol=0, atol=1e-15)


@pytest.mark.parametrize("alpha", [0.0, -0.1, 1.5])
def test_snowflake_domain(line3, alpha):
    """Exponents outside (0, 1] are rejected."""
    with pytest.raises(DomainError):
        snowflake(line3, alpha)


def test_max_lp_exponent_examples(line3, isosceles_ultra):
    """Collinear triples give 1, ultrametric ones give infinity, snowflakes give 1/alpha."""
    assert max_lp_exponent(line3) == 1.0
    assert max_lp_exponent(isosceles_ultra) == math.inf
    assert max_lp_exponent(snowflake(line3, 0.5)) == pytest.approx(2.0, abs=1e-9)


def test_lp_exponent_lower_bound_below_optimum(line3):
    """The constructive exponent never exceeds the largest valid one."""
    flake = snowflake(line3, 0.5)
    bound = lp_exponent_lower_bound(flake)
    assert 1.0 < bound <= max_lp_exponent(flake) + 1e-9


def test_lp_exponent_lower_bound_rejects_violated_alpha(line3):
    """An SRA parameter below the space's requirement is a domain error."""
    with pytest.raises(DomainError):
        lp_exponent_lower_bound(snowflake(line3, 0.5), alpha=0.1)


def test_comparison_angles_equilateral(equilateral):
    """All angles of an equilateral triangle are pi/3."""
    result = comparison_angles(equilateral, [0, 1, 2])
    assert result.angles == pytest.approx([math.pi / 3] * 3)
    assert not result.degenerate


def test_comparison_angles_right_isosceles():
    """Sides (1, sqrt2/2, sqrt2/2) put a right angle at the apex."""
    h = math.sqrt(2.0) / 2.0
    space = FiniteMetricSpace.from_matrix([[0, 1, h], [1, 0, h], [h, h, 0]])
    result = comparison_angles(space, [0, 1, 2])
    assert result.angles[2] == pytest.approx(math.pi / 2)
    assert sum(result.angles) == pytest.approx(math.pi)


def test_comparison_angles_degenerate(line3):
    """Collinear triples return pi at the middle point and are flagged."""
    result = comparison_angles(line3, [0, 1, 2])
    assert result.degenerate
    assert result.angles == [0.0, math.pi, 0.0]


def test_comparison_angles_needs_distinct_points(line3):
    with pytest.raises(DomainError):
        comparison_angles(line3, [0, 0, 1])


def test_doubling_probe_grid():
    """Sixteen steps of 1/16 on [0, 1] pack 0, 1/2 and 1 into B(x, 1)."""
    grid = FiniteMetricSpace.from_coords(np.linspace(0.0, 1.0, 17))
    probe = doubling_probe(grid, [1.0])
    assert probe.count == 3
    assert probe.radius == 1.0


def test_doubling_probe_sixteen_points():
    """With 16 points the step is 1/15, so 1/2 is missed and greedy stops at 0 and 8/15."""
    grid = FiniteMetricSpace.from_coords(np.linspace(0.0, 1.0, 16))
    assert doubling_probe(grid, [1.0]).count == 2


def test_doubling_probe_two_points():
    space = FiniteMetricSpace.from_coords([0.0, 1.0])
    assert doubling_probe(space, [0.5, 1.0, 2.0]).count <= 2


def test_doubling_probe_empty_grid(line3):
    """An empty radius grid is a domain error."""
    with pytest.raises(DomainError):
        doubling_probe(line3, [])


def test_restrict_and_permute(line3):
    """Restriction keeps labels; permutations must be complete."""
    sub = line3.restrict([2, 0])
    assert sub.labels == ["2", "0"]
    assert sub.distance(0, 1) == pytest.approx(2.0)
    with pytest.raises(StructuralError):
        line3.permute([0, 0, 1])
    assert line3.diameter() == pytest.approx(2.0)


@settings(max_examples=40)
@given(space=point_clouds(), alpha=st.floats(min_value=0.05, max_value=1.0))
def test_snowflake_is_always_metric(space, alpha):
    """Powers of a metric with exponent at most 1 are metrics."""
    assert validate(snowflake(space, alpha), tol=1e-12).passed


@settings(max_examples=30)
@given(space=point_clouds())
def test_comparison_angles_sum_to_pi(space):
    """Nondegenerate comparison triangles have angle sum pi."""
    result = comparison_angles(space, [0, 1, 2])
    if not result.degenerate:
        assert sum(result.angles) == pytest.approx(math.pi, abs=1e-9)


@settings(max_examples=25)
@given(space=point_clouds(max_points=7))
def test_validate_is_permutation_invariant(space):
    """Reordering points does not change the validation verdict."""
    order = list(reversed(range(space.n)))
    assert validate(space).passed == validate(space.permute(order)).passed
