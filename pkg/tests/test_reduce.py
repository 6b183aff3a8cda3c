"""Random projection bound/map/report and the PCA retention procedure."""

import math

import numpy as np
import pytest

from distsim import (
    DegenerateData,
    DimensionMismatch,
    DomainError,
    JLConfig,
    SampleMatrix,
    jl_distortion_report,
    jl_min_dimension,
    jl_project,
    pca_reduce,
)


def bound_value(n, eps):
    return 4.0 * math.log(n) / (eps ** 2 / 2 - eps ** 3 / 3)


class TestMinDimension:
    def test_reference_point(self):
        assert jl_min_dimension(566, 0.5) == 305

    def test_output_satisfies_bound_and_predecessor_does_not(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = int(rng.integers(2, 5000))
            eps = float(rng.uniform(0.05, 0.95))
            k = jl_min_dimension(n, eps)
            assert k >= bound_value(n, eps)
            assert k - 1 < bound_value(n, eps)

    def test_monotone_in_epsilon(self):
        ks = [jl_min_dimension(566, e) for e in (0.2, 0.4, 0.6, 0.8)]
        assert all(a >= b for a, b in zip(ks, ks[1:]))

    def test_edge_sanity(self):
        assert jl_min_dimension(2, 0.9999) > 0

    def test_domain(self):
        with pytest.raises(DomainError):
            jl_min_dimension(1, 0.5)
        with pytest.raises(DomainError):
            jl_min_dimension(10, 1.0)


class TestProject:
    def test_zero_matrix_maps_to_zero(self):
        out = jl_project(np.zeros((4, 10)), 3, seed=0)
        assert np.all(out == 0.0)

    def test_single_point_shape(self):
        out = jl_project(np.ones((1, 7)), 4, seed=0)
        assert out.shape == (1, 4)

    def test_deterministic(self):
        x = np.random.default_rng(0).standard_normal((5, 20))
        assert np.array_equal(jl_project(x, 6, seed=3), jl_project(x, 6, seed=3))
        assert not np.array_equal(jl_project(x, 6, seed=3), jl_project(x, 6, seed=4))

    def test_sample_matrix_wrapping(self):
        sm = SampleMatrix(np.ones((3, 5)))
        out = jl_project(sm, 2, seed=1)
        assert isinstance(out, SampleMatrix)
        assert out.labels == ("jl0", "jl1")

    def test_norm_preserved_in_expectation(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((1, 50))
        base = float(np.sum(x ** 2))
        ratios = []
        for seed in range(200):
            y = jl_project(x, 40, seed=seed)
            ratios.append(float(np.sum(y ** 2)) / base)
        assert 0.95 <= np.mean(ratios) <= 1.05

    def test_distortion_high_probability(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((40, 300))
        k = jl_min_dimension(40, 0.4)
        rep = jl_distortion_report(x, jl_project(x, k, seed=0), 0.4)
        assert rep.fraction_within >= 0.99


class TestDistortionReport:
    def test_identity_projection(self):
        x = np.random.default_rng(0).standard_normal((10, 6))
        rep = jl_distortion_report(x, x, 0.3)
        assert rep.min_ratio == rep.max_ratio == rep.mean_ratio == 1.0
        assert rep.fraction_within == 1.0
        assert rep.pair_count == 45

    def test_doubling_scales_ratios_by_four(self):
        x = np.random.default_rng(1).standard_normal((8, 5))
        rep = jl_distortion_report(x, 2.0 * x, 0.5)
        assert rep.mean_ratio == pytest.approx(4.0, rel=1e-12)
        assert rep.fraction_within == 0.0
        rep_wide = jl_distortion_report(x, 2.0 * x, 3.5)
        assert rep_wide.fraction_within == 1.0

    def test_point_count_mismatch(self):
        with pytest.raises(DimensionMismatch):
            jl_distortion_report(np.ones((3, 2)), np.ones((4, 2)), 0.3)

    def test_coincident_points_excluded(self):
        x = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
        rep = jl_distortion_report(x, x, 0.1)
        assert rep.pair_count == 2


class TestJLConfig:
    def test_auto_k(self):
        cfg = JLConfig(n_points=566, epsilon=0.5)
        assert cfg.k == 305

    def test_explicit_k_kept(self):
        assert JLConfig(n_points=100, epsilon=0.3, k=12).k == 12


class TestPcaReduce:
    def test_full_rank_roundtrip(self):
        x = np.random.default_rng(3).standard_normal((40, 6))
        out, kept = pca_reduce(SampleMatrix(x), component_count=6,
                               return_truncated=False, transpose_if_needed=False)
        assert kept == 6
        assert np.max(np.abs(out.values - x)) < 1e-8

    def test_rank_one_keeps_single_component(self):
        x = np.outer(np.linspace(1, 3, 25), [1.0, 2.0, -1.0, 0.5])
        out, kept = pca_reduce(SampleMatrix(x), significant_digits=6,
                               return_truncated=True, transpose_if_needed=False)
        assert kept == 1
        assert out.values.shape == (25, 1)

    def test_retention_depends_on_digits(self):
        rng = np.random.default_rng(4)
        # steeply decaying spectrum: coarse rounding hides small increments
        basis = rng.standard_normal((8, 8))
        scales = np.array([10.0, 1.0, 0.1, 0.01, 1e-3, 1e-4, 1e-5, 1e-6])
        x = rng.standard_normal((300, 8)) * scales @ basis
        _, kept_coarse = pca_reduce(SampleMatrix(x), significant_digits=2,
                                    return_truncated=True, transpose_if_needed=False)
        _, kept_fine = pca_reduce(SampleMatrix(x), significant_digits=6,
                                  return_truncated=True, transpose_if_needed=False)
        assert kept_fine > kept_coarse

    def test_truncated_scores_have_nonincreasing_variance(self):
        x = np.random.default_rng(5).standard_normal((60, 10)) * np.arange(1, 11)
        out, kept = pca_reduce(SampleMatrix(x), component_count=10,
                               return_truncated=True, transpose_if_needed=False)
        variances = out.values.var(axis=0)
        assert np.all(np.diff(variances) <= 1e-9)

    def test_transpose_if_needed(self):
        x = np.random.default_rng(6).standard_normal((5, 30))
        out, kept = pca_reduce(SampleMatrix(x), component_count=2,
                               return_truncated=True, transpose_if_needed=True)
        # transposed to 30x5, reduced to 30x2, transposed back to 2x30
        assert out.values.shape == (2, 30)

    def test_reconstruction_restores_center(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((50, 4)) + np.array([10.0, -5.0, 0.0, 3.0])
        out, _ = pca_reduce(SampleMatrix(x), component_count=4,
                            return_truncated=False, transpose_if_needed=False)
        assert np.allclose(out.values.mean(axis=0), x.mean(axis=0), atol=1e-9)

    def test_mode_exclusivity(self):
        x = SampleMatrix(np.ones((3, 3)) + np.eye(3))
        with pytest.raises(DomainError):
            pca_reduce(x, significant_digits=3, component_count=2)
        with pytest.raises(DomainError):
            pca_reduce(x)

    def test_degenerate_data(self):
        with pytest.raises(DegenerateData):
            pca_reduce(SampleMatrix(np.ones((5, 3))), component_count=1,
                       transpose_if_needed=False)

    def test_count_capped_at_column_count(self):
        x = np.random.default_rng(8).standard_normal((20, 3))
        _, kept = pca_reduce(SampleMatrix(x), component_count=10,
                             return_truncated=True, transpose_if_needed=False)
        assert kept == 3

    def test_deterministic(self):
        x = SampleMatrix(np.random.default_rng(9).standard_normal((30, 5)))
        a, _ = pca_reduce(x, significant_digits=3, return_truncated=True,
                          transpose_if_needed=False)
        b, _ = pca_reduce(x, significant_digits=3, return_truncated=True,
                          transpose_if_needed=False)
        assert np.array_equal(a.values, b.values)
