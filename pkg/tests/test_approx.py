"""Mixture density, grid convolution, and moment-matched approximations."""

import math

import numpy as np
import pytest

from distsim import (
    DiscreteApprox,
    DomainError,
    GridTooCoarse,
    InvalidDistribution,
    MomentMatrixNotPD,
    NLNComponent,
    QuadConfig,
    bc_coefficient_discrete,
    integrate_1d,
    moment_match,
    nln_density,
    nln_sum_density,
)

from oracles import (
    GAUSS_HERMITE_2_NODES,
    GAUSS_HERMITE_2_WEIGHTS,
    GAUSS_HERMITE_3_NODES,
    GAUSS_HERMITE_3_WEIGHTS,
    normal_pdf,
)

CFG = QuadConfig(seed=2)

#: raw moments of the standard normal, m_0..m_5
STD_NORMAL_MOMENTS = np.array([1.0, 0.0, 1.0, 0.0, 3.0, 0.0])


class TestNlnDensity:
    def test_degenerate_mixing_is_exact_normal(self):
        comp = NLNComponent(1, 0.0, 0.0)
        assert nln_density(0.0, comp) == pytest.approx(1 / math.sqrt(2 * math.pi),
                                                       abs=1e-15)
        comp4 = NLNComponent(4, 0.7, 0.0)
        xs = np.linspace(-2, 2, 9)
        for x in xs:
            assert nln_density(float(x), comp4) == pytest.approx(
                float(normal_pdf(x, 0.0, 0.25)), abs=1e-15
            )

    def test_even_symmetry(self):
        comp = NLNComponent(2, 0.3, 0.8)
        for u in (0.1, 0.5, 1.7):
            assert nln_density(u, comp) == nln_density(-u, comp)

    def test_matches_simulation_histogram(self):
        comp = NLNComponent(1, 0.0, 1.0)
        rng = np.random.default_rng(0)
        n = 10_000_000
        draws = rng.standard_normal(n) * np.exp(rng.standard_normal(n))
        width = 0.05
        for u in (0.5, 1.0, 2.0):
            inside = np.count_nonzero(np.abs(draws - u) <= width / 2)
            p_hat = inside / n
            dens_hat = p_hat / width
            se = math.sqrt(p_hat * (1 - p_hat) / n) / width
            assert abs(nln_density(u, comp) - dens_hat) <= 3 * se + 1e-4

    def test_normalizes_across_parameter_battery(self):
        for sigma in (0.0, 0.25, 1.0, 2.0):
            for k in (1, 4, 16):
                comp = NLNComponent(k, 0.0, sigma)
                mass = integrate_1d(lambda u: nln_density(u, comp),
                                    -math.inf, math.inf,
                                    QuadConfig(abs_tol=1e-8)).value
                assert mass == pytest.approx(1.0, abs=1e-6)

    def test_small_sigma_approaches_normal(self):
        for k in (1, 4):
            comp = NLNComponent(k, 0.0, 1e-3)
            xs = np.linspace(-5 / math.sqrt(k), 5 / math.sqrt(k), 101)
            gap = max(abs(nln_density(float(x), comp)
                          - float(normal_pdf(x, 0.0, 1.0 / k))) for x in xs)
            assert gap < 1e-3

    def test_component_validation(self):
        with pytest.raises(DomainError):
            NLNComponent(0, 0.0, 1.0)
        with pytest.raises(DomainError):
            NLNComponent(1, 0.0, -0.1)


class TestNlnSumDensity:
    def test_single_component_equals_pointwise_density(self):
        comp = NLNComponent(1, 0.0, 0.5)
        grid = nln_sum_density([comp], n_points=1024)
        idx = np.searchsorted(grid.x, 0.4)
        assert grid.values[idx] == pytest.approx(
            nln_density(float(grid.x[idx]), comp), rel=1e-9
        )

    def test_two_degenerate_components_give_normal_sum(self):
        comp = NLNComponent(1, 0.0, 0.0)
        grid = nln_sum_density([comp, comp])
        want = normal_pdf(grid.x, 0.0, 2.0)
        assert np.max(np.abs(grid.values - want)) < 1e-4
        assert grid.mass() == pytest.approx(1.0, abs=1e-4)

    def test_three_mixed_components_match_simulation(self):
        comps = [NLNComponent(3, 0.0, 0.25), NLNComponent(3, 0.2, 0.5),
                 NLNComponent(3, 0.0, 0.0)]
        grid = nln_sum_density(comps, cfg=CFG)
        rng = np.random.default_rng(1)
        n = 10_000_000
        total = np.zeros(n)
        for c in comps:
            x = rng.standard_normal(n) / math.sqrt(c.k)
            y = c.mu_y + c.sigma_y * rng.standard_normal(n)
            total += x * np.exp(y)
        for u in (-1.0, 0.0, 0.5, 1.5):
            width = 0.04
            p_hat = np.count_nonzero(np.abs(total - u) <= width / 2) / n
            dens_hat = p_hat / width
            se = math.sqrt(max(p_hat, 1e-12) * (1 - p_hat) / n) / width
            dens = float(np.interp(u, grid.x, grid.values))
            assert abs(dens - dens_hat) <= 3 * se + 2e-3

    def test_too_coarse_grid_rejected(self):
        comp = NLNComponent(1, 0.0, 0.0)
        with pytest.raises(GridTooCoarse):
            nln_sum_density([comp, comp], n_points=16, span_sigmas=2.0)

    def test_needs_components(self):
        with pytest.raises(DomainError):
            nln_sum_density([])

    def test_csv_export(self, tmp_path):
        grid = nln_sum_density([NLNComponent(1, 0.0, 0.0)], n_points=256)
        path = tmp_path / "grid.csv"
        grid.to_csv(path)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape == (256, 2)
        assert np.array_equal(data[:, 0], grid.x)


class TestMomentMatch:
    def test_single_node(self):
        approx = moment_match(np.array([1.0, 0.0]), 1)
        assert approx.nodes[0] == 0.0 and approx.weights[0] == 1.0

    def test_two_point_standard_normal(self):
        approx = moment_match(STD_NORMAL_MOMENTS[:4], 2)
        assert np.allclose(approx.nodes, GAUSS_HERMITE_2_NODES, atol=1e-12)
        assert np.allclose(approx.weights, GAUSS_HERMITE_2_WEIGHTS, atol=1e-12)

    def test_three_point_standard_normal(self):
        approx = moment_match(STD_NORMAL_MOMENTS, 3)
        assert np.allclose(approx.nodes, GAUSS_HERMITE_3_NODES, atol=1e-8)
        assert np.allclose(approx.weights, GAUSS_HERMITE_3_WEIGHTS, atol=1e-8)

    def test_density_target(self):
        approx = moment_match((lambda x: float(normal_pdf(x)), (-12.0, 12.0)), 3)
        assert np.allclose(approx.nodes, GAUSS_HERMITE_3_NODES, atol=1e-7)

    def test_all_matched_moments_reproduced(self):
        rng = np.random.default_rng(3)
        sample = rng.gamma(2.0, 1.5, size=50_000)
        n = 4
        moms = np.array([float(np.mean(sample ** j)) for j in range(2 * n)])
        approx = moment_match(moms, n)
        for j in range(2 * n):
            assert approx.moment(j) == pytest.approx(
                moms[j], rel=1e-8, abs=1e-10
            )

    def test_next_moment_not_matched(self):
        approx = moment_match(STD_NORMAL_MOMENTS, 3)
        assert approx.moment(6) == pytest.approx(9.0, abs=1e-8)
        assert abs(approx.moment(6) - 15.0) > 1.0

    def test_invalid_moment_sequence_rejected(self):
        # m_2 < m_1^2 is impossible for any distribution
        with pytest.raises(MomentMatrixNotPD):
            moment_match(np.array([1.0, 1.0, 0.5, 0.0, 1.0, 0.0]), 3)

    def test_leading_moment_must_be_one(self):
        with pytest.raises(DomainError):
            moment_match(np.array([2.0, 0.0, 1.0, 0.0]), 2)

    def test_feeds_discrete_coefficient(self):
        a = moment_match(STD_NORMAL_MOMENTS, 3)
        shifted = np.array([1.0, 0.5, 1.25, 1.625, 4.5625, 8.78125])  # N(0.5, 1)
        b = moment_match(shifted, 3)
        rho = bc_coefficient_discrete(a.as_discrete_dist(), b.as_discrete_dist())
        assert 0.0 <= rho.coefficient <= 1.0


class TestDiscreteApprox:
    def test_invariants(self):
        with pytest.raises(InvalidDistribution):
            DiscreteApprox(np.array([0.0, 0.0]), np.array([0.5, 0.5]))
        with pytest.raises(InvalidDistribution):
            DiscreteApprox(np.array([0.0, 1.0]), np.array([0.7, 0.7]))
        with pytest.raises(InvalidDistribution):
            DiscreteApprox(np.array([0.0, 1.0]), np.array([-0.1, 1.1]))
