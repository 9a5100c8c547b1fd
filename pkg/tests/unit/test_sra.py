"""Tests for SRA, ultrametric and UNC analysis."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roughmetrics.core.errors import DomainError
from roughmetrics.metric.analysis import snowflake
from roughmetrics.metric.space import FiniteMetricSpace
from roughmetrics.sra.analysis import (
    ef_bounds,
    hausdorff_dimension_cantor,
    is_ultrametric,
    max_comparison_angle_bound,
    save_triple_table_csv,
    snowflake_exponent_q,
    snowflake_sra_parameter,
    sra_check,
    sra_required_alpha,
    sra_triple_table,
    tw_exponent_q,
    unc_check,
    unc_delta_from_sra,
)
from tests.strategies import dendrogram_ultrametrics, point_clouds

SQRT2_M1 = math.sqrt(2.0) - 1.0


@pytest.fixture
def right_isosceles():
    """Triangle with sides (1, sqrt2/2, sqrt2/2)."""
    h = math.sqrt(2.0) / 2.0
    return FiniteMetricSpace.from_matrix([[0, 1, h], [1, 0, h], [h, h, 0]])


def test_required_alpha_collinear(line3):
    """Three equally spaced points on a line need alpha = 1."""
    report = sra_required_alpha(line3)
    assert report.required_alpha == pytest.approx(1.0)
    assert report.argmax_triple == [0, 2, 1]


def test_required_alpha_snowflake(line3):
    """The half-snowflake of {0,1,2} needs exactly sqrt(2) - 1."""
    assert sra_required_alpha(snowflake(line3, 0.5)).required_alpha == pytest.approx(SQRT2_M1)


def test_required_alpha_right_isosceles(right_isosceles):
    report = sra_required_alpha(right_isosceles)
    assert report.required_alpha == pytest.approx(SQRT2_M1)
    assert report.argmax_triple == [0, 1, 2]


def test_required_alpha_small_spaces():
    """Spaces with at most two points satisfy SRA(0)."""
    pair = FiniteMetricSpace.from_coords([0.0, 3.0])
    report = sra_required_alpha(pair)
    assert report.required_alpha == 0.0
    assert report.argmax_triple is None


def test_triple_table(line3, tmp_path):
    """The per-triple table lists one row per triple and exports as CSV."""
    rows = sra_triple_table(line3)
    assert len(rows) == 1
    assert (rows[0].i, rows[0].j, rows[0].k) == (0, 1, 2)

    path = tmp_path / "triples.csv"
    save_triple_table_csv(rows, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "i,j,k,required_alpha"
    assert lines[1].startswith("0,1,2,1.0")


def test_sra_check_trivial_alpha(line3, isosceles_ultra):
    """Every metric satisfies SRA(1); ultrametrics satisfy SRA(0)."""
    assert sra_check(line3, 1.0).passed
    assert sra_check(isosceles_ultra, 0.0).passed


def test_sra_check_reports_violation(line3):
    result = sra_check(line3, 0.5)
    assert not result.passed
    assert result.violating_triple == [0, 2, 1]
    assert result.required_alpha == pytest.approx(1.0)


def test_is_ultrametric(line3, isosceles_ultra):
    assert is_ultrametric(isosceles_ultra)
    assert not is_ultrametric(line3)


@pytest.mark.parametrize(
    "alpha,expected", [(1.0, 1.0), (0.5, 0.4142136), (0.6, 0.5157166), (0.0, 0.0)]
)
def test_snowflake_sra_parameter(alpha, expected):
    assert snowflake_sra_parameter(alpha) == pytest.approx(expected, abs=1e-7)


def test_closed_form_domains():
    """Closed forms reject parameters outside their ranges."""
    with pytest.raises(DomainError):
        snowflake_sra_parameter(1.5)
    with pytest.raises(DomainError):
        unc_delta_from_sra(-0.1)
    with pytest.raises(DomainError):
        tw_exponent_q(0.6)
    with pytest.raises(DomainError):
        hausdorff_dimension_cantor(0.5)


def test_unc_delta_and_limits():
    """delta(alpha) = (1 - alpha) / (2 (1 + alpha)) with limit values at the endpoints."""
    assert unc_delta_from_sra(0.5) == pytest.approx(1.0 / 6.0)
    assert unc_delta_from_sra(0.0) == 0.5
    assert unc_delta_from_sra(1.0) == 0.0


def test_snowflake_exponents():
    """Both exponent formulas give 1.1793 at matching parameters."""
    assert snowflake_exponent_q(0.5) == pytest.approx(1.1793, abs=1e-4)
    assert tw_exponent_q(1.0 / 6.0) == pytest.approx(1.1793, abs=1e-4)
    assert snowflake_exponent_q(0.0) == math.inf
    assert tw_exponent_q(0.5) == math.inf


def test_exponent_consistency_on_grid():
    """q(alpha) equals the UNC exponent at delta(alpha) on a 99-point grid."""
    for alpha in np.linspace(0.01, 0.99, 99):
        assert snowflake_exponent_q(alpha) == pytest.approx(
            tw_exponent_q(unc_delta_from_sra(alpha)), rel=0, abs=1e-12
        )


def test_angle_bound_and_cantor_dimension():
    assert max_comparison_angle_bound(0.0) == pytest.approx(math.pi / 2)
    assert max_comparison_angle_bound(1.0) == pytest.approx(math.pi)
    assert hausdorff_dimension_cantor(1.0 / 3.0) == pytest.approx(math.log(2) / math.log(3))


def test_unc_two_points():
    """Without third points every pair is free, witnessed by 1/2."""
    report = unc_check(FiniteMetricSpace.from_coords([0.0, 1.0]), 0.2)
    assert report.passed
    assert report.pairs[0].lam == pytest.approx(0.5)


def test_unc_collinear_midpoint():
    """The midpoint blocks [0.4, 0.6]; the witness lies outside it."""
    space = FiniteMetricSpace.from_coords([0.0, 0.5, 1.0])
    report = unc_check(space, 0.1)
    assert report.passed
    outer = next(pair for pair in report.pairs if (pair.x, pair.y) == (0, 2))
    assert outer.blocking == [pytest.approx([0.4, 0.6])]
    assert not 0.4 <= outer.lam <= 0.6
    assert outer.lam == pytest.approx(0.25)


def test_unc_fully_blocked():
    """A dense line blocks the whole window for its end pair."""
    space = FiniteMetricSpace.from_coords(np.linspace(0.0, 1.0, 41))
    report = unc_check(space, 0.1)
    assert not report.passed
    end_pair = next(pair for pair in report.pairs if (pair.x, pair.y) == (0, 40))
    assert not end_pair.feasible
    assert end_pair.lam is None


def test_unc_snowflaked_grid():
    """A half-snowflaked 9-point grid is delta(sqrt2 - 1)-UNC."""
    grid = snowflake(FiniteMetricSpace.from_coords(np.arange(9.0)), 0.5)
    assert unc_check(grid, unc_delta_from_sra(SQRT2_M1)).passed


@pytest.mark.parametrize("delta", [0.0, 0.5, -1.0])
def test_unc_delta_domain(line3, delta):
    with pytest.raises(DomainError):
        unc_check(line3, delta)


def test_ef_bounds_examples():
    """Bounds are powers of two in the opening angle arccos(alpha)."""
    plane = ef_bounds(2, 0.0)
    assert (plane.lower, plane.upper) == pytest.approx((4.0, 256.0))
    line = ef_bounds(1, 0.7)
    assert (line.lower, line.upper) == (2.0, 2.0)
    space = ef_bounds(3, 0.0)
    assert space.lower == pytest.approx(16.0)
    assert space.upper == pytest.approx(2.0**64)
    assert not space.overflow


def test_ef_bounds_overflow():
    """Huge exponents saturate to infinity with a flag."""
    result = ef_bounds(6, 0.9)
    assert result.upper == math.inf
    assert result.overflow
    assert result.upper_exponent > 1023


def test_ef_bounds_domain():
    with pytest.raises(DomainError):
        ef_bounds(0, 0.5)
    with pytest.raises(DomainError):
        ef_bounds(2, 1.0)


def test_arithmetic_triples_converge():
    """Nearly arithmetic snowflaked triples need almost 2**alpha - 1."""
    alpha = 0.6
    for h in [1e-2, 1e-3, 1e-4]:
        triple = FiniteMetricSpace.from_coords([1.0 - h, 1.0, 1.0 + h + h * h])
        required = sra_required_alpha(snowflake(triple, alpha)).required_alpha
        assert required == pytest.approx(2.0**alpha - 1.0, abs=10 * h)
    exact = FiniteMetricSpace.from_coords([0.5, 1.0, 1.5])
    assert sra_required_alpha(snowflake(exact, alpha)).required_alpha == pytest.approx(
        2.0**alpha - 1.0, abs=1e-6
    )


@settings(max_examples=40)
@given(space=point_clouds(), beta=st.floats(0.0, 1.0), gamma=st.floats(0.0, 1.0))
def test_sra_check_monotone_in_alpha(space, beta, gamma):
    """SRA(beta) implies SRA(alpha) for alpha >= beta."""
    low, high = sorted([beta, gamma])
    if sra_check(space, low).passed:
        assert sra_check(space, high).passed


@settings(max_examples=40)
@given(space=point_clouds(), factor=st.floats(1e-3, 1e3))
def test_required_alpha_scale_invariant(space, factor):
    base = sra_required_alpha(space).required_alpha
    assert sra_required_alpha(space.scaled(factor)).required_alpha == pytest.approx(
        base, rel=1e-9, abs=1e-12
    )


@settings(max_examples=40)
@given(space=point_clouds(), alpha=st.floats(0.05, 0.95))
def test_snowflake_bound(space, alpha):
    """Every alpha-snowflake satisfies SRA(2**alpha - 1)."""
    required = sra_required_alpha(snowflake(space, alpha)).required_alpha
    assert required <= snowflake_sra_parameter(alpha) + 1e-12


@settings(max_examples=30)
@given(space=point_clouds(max_points=7))
def test_sra_implies_unc(space):
    """SRA(alpha) spaces are delta(alpha)-UNC."""
    flake = snowflake(space, 0.5)
    required = max(sra_required_alpha(flake).required_alpha, 1e-6)
    assert unc_check(flake, unc_delta_from_sra(required)).passed


@settings(max_examples=40)
@given(space=dendrogram_ultrametrics())
def test_dendrograms_are_ultrametric(space):
    assert is_ultrametric(space)
    assert sra_required_alpha(space).required_alpha == 0.0
