"""Tests for Gram embeddings, the tree map F, the one-limit map G and distortion."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from roughmetrics.constructions.laakso import laakso_level
from roughmetrics.constructions.trees import TreePoint
from roughmetrics.core.errors import DomainError
from roughmetrics.core.models import EmbeddingResult, NormKind
from roughmetrics.embeddings.distortion import distortion, pairwise_norm, save_coords_csv
from roughmetrics.embeddings.schoenberg import schoenberg_embed
from roughmetrics.embeddings.trees import (
    embedding_dimension_bound,
    halving_lag,
    lag_bound,
    minimal_modulus,
    one_limit_embed_g,
    sequence_condition_check,
    tree_embed_f,
    tree_length,
)
from roughmetrics.metric.space import FiniteMetricSpace
from tests.strategies import dendrogram_ultrametrics, point_clouds

DYADIC = [2.0 ** (1 - k) for k in range(1, 7)]


@pytest.fixture
def star():
    """A center at distance 1 from three leaves that are pairwise 2 apart."""
    return FiniteMetricSpace.from_matrix(
        [[0, 1, 1, 1], [1, 0, 2, 2], [1, 2, 0, 2], [1, 2, 2, 0]], name="star"
    )


def _pair_clusters(t):
    return [FiniteMetricSpace.from_matrix([[0.0, tk], [tk, 0.0]]) for tk in t]


class TestDistortion:
    def test_identity_map_of_euclidean_cloud(self):
        rng = np.random.default_rng(3)
        space = FiniteMetricSpace.from_coords(rng.normal(size=(8, 3)))

        result = distortion(space, space.coords)

        assert result.lipschitz == pytest.approx(1.0, abs=1e-12)
        assert result.rescaled == pytest.approx(1.0, abs=1e-12)

    def test_scaling_by_three(self, line3):
        result = distortion(line3, 3.0 * line3.coords)

        assert result.expansion == pytest.approx(3.0)
        assert result.contraction == pytest.approx(1.0 / 3.0)
        assert result.lipschitz == pytest.approx(3.0)
        assert result.rescaled == pytest.approx(1.0)

    def test_collapsed_pair_is_rejected(self, line3):
        with pytest.raises(DomainError, match="same image"):
            distortion(line3, [[0.0], [1.0], [1.0]])

    def test_row_count_mismatch(self, line3):
        with pytest.raises(DomainError):
            distortion(line3, [[0.0], [1.0]])

    def test_mixed_norm_adds_blocks(self):
        d = pairwise_norm([[0.0, 0.0, 0.0], [1.0, 3.0, 4.0]], NormKind.MIXED, split=1)
        assert d[0, 1] == pytest.approx(6.0)

    def test_mixed_norm_needs_split(self):
        with pytest.raises(DomainError):
            pairwise_norm([[0.0, 0.0], [1.0, 1.0]], NormKind.MIXED)

    def test_coords_csv_header(self, tmp_path):
        result = EmbeddingResult(
            coords=[[0.0, 1.0], [2.0, 3.0]], target_norm=NormKind.TAXICAB, dimension=2
        )
        path = tmp_path / "out" / "coords.csv"

        save_coords_csv(result, path)

        lines = path.read_text().splitlines()
        assert lines[0] == "# norm=taxicab"
        assert len(lines) == 3
        assert lines[2].split(",") == ["2", "3"]


class TestSchoenberg:
    def test_two_points_on_a_line(self):
        space = FiniteMetricSpace.from_matrix([[0, 5], [5, 0]])

        result = schoenberg_embed(space)

        assert result.success
        assert result.dimension == 1
        assert np.allclose(result.coords, [[0.0], [5.0]], atol=1e-12)

    def test_isosceles_apex_height(self, isosceles_ultra):
        result = schoenberg_embed(isosceles_ultra)

        coords = np.asarray(result.coords)
        assert result.exact
        assert result.dimension == 2
        assert np.linalg.norm((coords[1] + coords[2]) / 2) == pytest.approx(math.sqrt(3.75))
        assert np.allclose(coords[0], 0.0)

    def test_laakso_level_four(self):
        space = laakso_level(4)

        result = schoenberg_embed(space)

        assert result.success
        assert result.exact
        assert result.dimension <= 15
        assert result.distortion is not None
        assert result.distortion.lipschitz == pytest.approx(1.0, abs=1e-9)

    def test_star_is_not_euclidean(self, star):
        result = schoenberg_embed(star)

        assert not result.success
        assert "not Euclidean-embeddable" in result.message

    def test_base_index_range(self, line3):
        with pytest.raises(DomainError):
            schoenberg_embed(line3, base_index=3)

    def test_other_base_point(self, line3):
        result = schoenberg_embed(line3, base_index=1)

        assert result.exact
        assert result.dimension == 1
        assert result.coords[1] == pytest.approx([0.0])

    @given(dendrogram_ultrametrics())
    def test_ultrametrics_always_embed(self, space):
        result = schoenberg_embed(space)

        assert result.success
        assert result.exact
        assert result.dimension <= space.n - 1
        assert result.distortion.lipschitz == pytest.approx(1.0, abs=1e-9)

    @given(point_clouds(dim=2))
    def test_planar_clouds_embed_in_two_dimensions(self, space):
        result = schoenberg_embed(space)

        assert result.success
        assert result.dimension <= 2


class TestSequenceConditions:
    def test_dyadic_sequence(self):
        check = sequence_condition_check(DYADIC, 0.5, 1)

        assert check.cond3
        assert check.cond4_sup == 0
        assert check.cond3_failure is None

    def test_harmonic_sequence_fails(self):
        t = [1.0 / k for k in range(1, 1001)]

        check = sequence_condition_check(t, 0.5, 1)

        assert not check.cond3
        assert check.cond3_failure == 2
        assert check.cond4_sup >= 400

    def test_constant_ratio(self):
        t = [0.9**k for k in range(100)]
        delta = 1.0 - 0.9**7

        check = sequence_condition_check(t, delta, 7)

        assert check.cond3
        assert check.cond4_sup == 6
        assert check.cond4_sup <= check.lag_bound

    def test_halving_lag_per_term(self):
        assert halving_lag([1.0, 0.6, 0.55, 0.4, 0.3]) == [2, 2, 2, 1, 0]

    def test_dimension_bound(self):
        assert embedding_dimension_bound(0.5, 1) == 2
        assert embedding_dimension_bound(1.0 - 0.9**7, 7) == 13

    def test_dimension_bound_rounds_lag_bound(self):
        assert lag_bound(0.5, 1) == pytest.approx(1.0)
        assert lag_bound(1.0 - 0.9**7, 7) == pytest.approx(12.579, abs=1e-3)
        delta = 1.0 - 0.9**7
        assert embedding_dimension_bound(delta, 7) == math.floor(lag_bound(delta, 7)) + 1

    def test_dimension_bound_domain(self):
        with pytest.raises(DomainError):
            embedding_dimension_bound(1.0, 2)
        with pytest.raises(DomainError):
            embedding_dimension_bound(0.5, 0)

    def test_tree_length(self):
        assert tree_length([1.0, 0.5, 0.25]) == pytest.approx(2.75)

    def test_minimal_modulus(self):
        assert minimal_modulus(DYADIC) == 1
        assert minimal_modulus([0.9**k for k in range(1, 60)]) == 7


class TestTreeMap:
    def test_dyadic_apexes_within_four(self):
        apexes = [TreePoint(k, 1.0) for k in range(1, 7)]

        result = tree_embed_f(DYADIC, 1, apexes)

        assert result.target_norm == NormKind.TAXICAB
        assert result.dimension == 2
        assert result.distortion.contraction == pytest.approx(2.0)
        assert result.distortion.lipschitz <= 4.0 + 1e-9

    def test_distinct_residues_are_isometric(self):
        apexes = [TreePoint(k, 1.0) for k in range(1, 4)]

        result = tree_embed_f(DYADIC, 3, apexes)

        assert result.exact
        assert result.distortion.lipschitz == pytest.approx(1.0)

    def test_base_segment_is_isometric(self):
        base = [TreePoint(0, x) for x in (0.0, 0.25, 0.5, 1.0)]

        result = tree_embed_f(DYADIC, 1, base)

        assert result.exact
        assert np.allclose(np.asarray(result.coords)[:, 1], 0.0)

    def test_default_points_are_segment_endpoints(self):
        result = tree_embed_f(DYADIC, 2)

        assert len(result.coords) == 2 + len(DYADIC)
        assert result.distortion.lipschitz <= 4.0 + 1e-9

    def test_halving_failure_names_k(self):
        with pytest.raises(DomainError, match="k=1"):
            tree_embed_f([1.0, 0.9, 0.8, 0.2], 1)

    @given(
        st.lists(
            st.one_of(
                st.tuples(st.just(0), st.floats(0.0, 0.95)),
                st.tuples(st.integers(1, 6), st.floats(0.05, 1.0)),
            ),
            min_size=2,
            max_size=12,
            unique=True,
        )
    )
    def test_never_expands_and_stays_within_four(self, raw):
        points = [TreePoint(segment, coord) for segment, coord in raw]

        result = tree_embed_f(DYADIC, 2, points)

        assert result.distortion.expansion <= 1.0 + 1e-12
        assert result.distortion.lipschitz <= 4.0 + 1e-9


class TestOneLimitMap:
    def test_singleton_clusters_reproduce_f(self):
        t = DYADIC[:4]
        clusters = [FiniteMetricSpace.from_matrix([[0.0]]) for _ in t]
        apexes = tree_embed_f(t, 1, [TreePoint(k, 1.0) for k in range(1, 5)])

        space, result = one_limit_embed_g(t, clusters)

        assert space.n == 4
        assert np.allclose(result.coords, apexes.coords)
        assert result.distortion.lipschitz == pytest.approx(apexes.distortion.lipschitz)
        assert result.within_cluster_ratios is None

    def test_pair_clusters_within_bounds(self):
        t = DYADIC[:4]

        space, result = one_limit_embed_g(t, _pair_clusters(t))

        big_l = 2.0
        low, high = result.cross_level_ratios
        assert space.n == 8
        assert result.dimension == 3
        assert result.split == 2
        assert low >= 1.0 / (4.0 * big_l) - 1e-9
        assert high <= big_l + 1.0 / (4.0 * big_l) + 1e-9

    def test_within_cluster_scaled_by_eight_l(self):
        t = DYADIC[:4]

        _, result = one_limit_embed_g(t, _pair_clusters(t))

        assert result.within_cluster_ratios == pytest.approx([1.0 / 16.0, 1.0 / 16.0])

    def test_cross_level_distance_is_twice_the_larger_height(self):
        t = DYADIC[:3]

        space, _ = one_limit_embed_g(t, _pair_clusters(t))

        assert space.distance(1, 5) == pytest.approx(2.0 * t[0])
        assert space.distance(2, 4) == pytest.approx(2.0 * t[1])

    def test_cluster_larger_than_j(self):
        t = DYADIC[:2]
        with pytest.raises(DomainError, match="J=1"):
            one_limit_embed_g(t, _pair_clusters(t), max_cluster=1)

    def test_cluster_too_wide(self):
        clusters = [FiniteMetricSpace.from_matrix([[0.0, 3.0], [3.0, 0.0]])]
        with pytest.raises(DomainError, match="wider"):
            one_limit_embed_g([1.0], clusters)

    def test_non_ultrametric_cluster(self):
        clusters = [FiniteMetricSpace.from_coords([0.0, 1.0, 2.0])]
        with pytest.raises(DomainError, match="not ultrametric"):
            one_limit_embed_g([1.0], clusters)

    def test_level_count_mismatch(self):
        with pytest.raises(DomainError):
            one_limit_embed_g(DYADIC[:3], _pair_clusters(DYADIC[:2]))
