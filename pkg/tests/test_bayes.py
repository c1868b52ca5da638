"""Prior updates, grid machinery, estimators, bounds, and the engines."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussbayes import bayes, displacement as disp, phase, squeezing as sq
from gaussbayes.bayes import (Circle, GammaPrior, GaussianPrior, GridDistribution,
                              InconsistentOutcomeError, Interval, ToleranceError,
                              average_posterior_variance)
from gaussbayes.phasespace import ProbeSpec


def gaussian_like(sigma_sq):
    def like(thetas, m):
        return np.exp(-((m - thetas) ** 2) / (2 * sigma_sq)) / math.sqrt(2 * math.pi * sigma_sq)
    return like


def rng_for(*lane):
    return np.random.default_rng(np.random.SeedSequence((99, *lane)))


class TestGaussianUpdate:
    def test_equal_variance_midpoint(self):
        post = bayes.gaussian_update(GaussianPrior(0.0, 1.0), 2.0, 1.0)
        assert post.mu0 == pytest.approx(1.0)
        assert post.var0 == pytest.approx(0.5)

    def test_uninformative_likelihood(self):
        prior = GaussianPrior(0.37, 2.1)
        post = bayes.gaussian_update(prior, 100.0, 1e12)
        assert post.mu0 == pytest.approx(prior.mu0, abs=1e-9)
        assert post.var0 == pytest.approx(prior.var0, rel=1e-9)

    def test_direct_substitution_and_grid_cross_check(self):
        post = bayes.gaussian_update(GaussianPrior(0.3, 0.25), 1.0, 0.5)
        assert post.mu0 == pytest.approx((0.5 * 0.3 + 0.25 * 1.0) / 0.75, rel=1e-14)
        assert post.var0 == pytest.approx(0.125 / 0.75, rel=1e-14)
        grid = GridDistribution.from_gaussian(GaussianPrior(0.3, 0.25), 4001)
        gpost = bayes.grid_update(grid, gaussian_like(0.5), 1.0)
        mean = bayes.mean_estimator(gpost)
        assert mean == pytest.approx(post.mu0, abs=1e-6)
        assert bayes.variance_mse(gpost, mean) == pytest.approx(post.var0, abs=1e-6)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.01, 10.0), st.floats(0.01, 10.0),
           st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
    def test_posterior_variance_contracts(self, var0, like_var, mu0, m):
        post = bayes.gaussian_update(GaussianPrior(mu0, var0), m, like_var)
        assert post.var0 < min(var0, like_var)


class TestGammaUpdate:
    def test_direct_rule(self):
        post = bayes.gamma_update(GammaPrior(1.0, 1.0), [math.sqrt(2.0)])
        assert post.a == pytest.approx(1.5)
        assert post.b == pytest.approx(2.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            bayes.gamma_update(GammaPrior(2.0, 1.0), [])

    def test_moments(self):
        # a'=3, b'=2: mean 3/2, variance 2(2a+m)/(2b+sum q^2)^2 = 12/16 = 3/4
        post = bayes.gamma_update(GammaPrior(2.0, 1.0), [1.0, 1.0])
        assert post.mean() == pytest.approx(1.5)
        assert post.variance() == pytest.approx(2.0 * 6.0 / 16.0)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-3, 3), min_size=2, max_size=6))
    def test_chain_equals_batch(self, qs):
        prior = GammaPrior(1.3, 0.7)
        chained = prior
        for q in qs:
            chained = bayes.gamma_update(chained, [q])
        batched = bayes.gamma_update(prior, qs)
        assert chained.a == pytest.approx(batched.a, rel=1e-12)
        assert chained.b == pytest.approx(batched.b, rel=1e-12)


class TestGridDistribution:
    def test_validation(self):
        with pytest.raises(ValueError):
            GridDistribution(Interval(0, 1), np.array([0.0, 0.0, 1.0]), np.ones(3))
        with pytest.raises(ValueError):
            GridDistribution(Interval(0, 1), np.linspace(0, 1, 3),
                             np.array([1.0, -0.1, 1.0]))
        with pytest.raises(ValueError):
            GridDistribution(Interval(0, 1), np.linspace(0, 1, 3), np.ones(3) * 3.0)

    def test_circle_flat_sin2_is_half(self):
        for support in (Circle(-math.pi, math.pi), Circle(0.0, math.pi)):
            d = GridDistribution.uniform(support, 512)
            assert bayes.variance_circular(d, 0.123) == pytest.approx(0.5, abs=1e-12)

    def test_sampler_matches_distribution(self):
        d = GridDistribution.from_gaussian(GaussianPrior(0.5, 0.04), 2001)
        draws = d.sample(rng_for(1), 200_000)
        assert draws.mean() == pytest.approx(0.5, abs=4 * 0.2 / math.sqrt(200_000) + 1e-4)
        assert draws.var() == pytest.approx(0.04, rel=0.02)

    def test_circle_sampler(self):
        d = GridDistribution.uniform(Circle(-math.pi, math.pi))
        draws = d.sample(rng_for(2), 50_000)
        assert np.all(draws >= -math.pi - 0.01) and np.all(draws <= math.pi + 0.01)
        assert abs(np.exp(1j * draws).mean()) < 0.02


class TestGridUpdate:
    def test_flat_times_constant_is_flat(self):
        d = GridDistribution.uniform(Interval(0.0, 2.0), 201)
        post = bayes.grid_update(d, lambda t, m: np.full_like(t, 0.7), 0.0)
        np.testing.assert_allclose(post.density, d.density, rtol=1e-12)

    def test_conjugate_closure(self):
        prior = GaussianPrior(0.2, 0.5)
        grid = GridDistribution.from_gaussian(prior, 4001)
        post = bayes.grid_update(grid, gaussian_like(0.8), -0.4)
        exact = bayes.gaussian_update(prior, -0.4, 0.8)
        mean = bayes.mean_estimator(post)
        assert mean == pytest.approx(exact.mu0, abs=1e-6)
        assert bayes.variance_mse(post, mean) == pytest.approx(exact.var0, abs=1e-6)

    def test_circular_posterior_from_flat_prior(self):
        alpha, phi_b = 0.5, 0.3  # alpha |beta| = 1 at |beta| = 2
        prior = GridDistribution.uniform(Circle(-math.pi, math.pi))
        beta = 2.0 * complex(math.cos(phi_b), -math.sin(phi_b))
        post = bayes.grid_update(
            prior, lambda t, m: phase.coherent_het_likelihood(alpha, m, t), beta)
        want = np.exp(2.0 * (np.cos(post.nodes - phi_b) - 1.0))
        want /= (want.sum() * 2 * math.pi / post.nodes.size)
        np.testing.assert_allclose(post.density, want, rtol=1e-9)
        assert bayes.circular_mean(post) == pytest.approx(phi_b, abs=1e-9)

    def test_zero_evidence(self):
        d = GridDistribution.from_gaussian(GaussianPrior(0.0, 0.01), 501)
        with pytest.raises(InconsistentOutcomeError):
            bayes.grid_update(d, gaussian_like(1e-4), 1e3)


class TestEvidence:
    def test_constant_likelihood(self):
        d = GridDistribution.uniform(Interval(0.0, 1.0), 101)
        assert bayes.evidence(d, lambda t, m: np.full_like(t, 0.37), 0) == pytest.approx(0.37)

    def test_gaussian_convolution(self):
        prior = GaussianPrior(0.4, 0.3)
        grid = GridDistribution.from_gaussian(prior, 4001, 8.0)
        m = 1.1
        got = bayes.evidence(grid, gaussian_like(0.6), m)
        total_var = 0.3 + 0.6
        want = math.exp(-((m - 0.4) ** 2) / (2 * total_var)) / math.sqrt(2 * math.pi * total_var)
        assert got == pytest.approx(want, rel=1e-8)

    def test_flat_phase_prior_matches_series(self):
        alpha = 1.0
        prior = GridDistribution.uniform(Circle(0.0, math.pi), 4096)
        for q in (-0.8, 0.5, 1.7):
            got = bayes.evidence(
                prior, lambda t, m: phase.coherent_hom_likelihood(alpha, m, t), q)
            assert got == pytest.approx(
                phase.coherent_hom_outcome_density(alpha, q), rel=1e-6)


class TestEstimators:
    def test_symmetric_density(self):
        d = GridDistribution.from_function(Interval(-1.0, 3.0),
                                           lambda t: np.exp(-((t - 1.0) ** 2)), 2001)
        assert bayes.mean_estimator(d) == pytest.approx(1.0, abs=1e-10)

    def test_gaussian_grid_moments(self):
        d = GridDistribution.from_gaussian(GaussianPrior(0.7, 0.01), 2001)
        assert bayes.mean_estimator(d) == pytest.approx(0.7, abs=1e-8)
        assert bayes.variance_mse(d, 0.7) == pytest.approx(0.01, rel=1e-6)

    def test_gamma_grid_moments(self):
        a, b = 2.0, 3.0
        d = GridDistribution.from_function(
            Interval(1e-9, 8.0), lambda t: t ** (a - 1) * np.exp(-b * t), 8001)
        mean = bayes.mean_estimator(d)
        assert mean == pytest.approx(a / b, abs=1e-6)
        assert bayes.variance_mse(d, mean) == pytest.approx(a / b**2, abs=1e-5)

    def test_circle_rejected_for_linear_ops(self):
        d = GridDistribution.uniform(Circle(0.0, math.pi))
        with pytest.raises(ValueError):
            bayes.mean_estimator(d)
        with pytest.raises(ValueError):
            bayes.variance_mse(d, 0.0)


class TestCircularStats:
    def test_von_mises_center(self):
        d = GridDistribution.from_function(
            Circle(-math.pi, math.pi), lambda t: np.exp(3.0 * np.cos(t - 0.9)), 2048)
        assert bayes.circular_mean(d) == pytest.approx(0.9, abs=1e-10)

    def test_flat_returns_none(self):
        d = GridDistribution.uniform(Circle(-math.pi, math.pi))
        assert bayes.circular_mean(d) is None

    def test_variance_flat_and_delta(self):
        flat = GridDistribution.uniform(Circle(-math.pi, math.pi))
        assert bayes.variance_circular(flat, 1.234) == pytest.approx(0.5, abs=1e-12)
        sharp = GridDistribution.from_function(
            Circle(-math.pi, math.pi), lambda t: np.exp(200.0 * np.cos(t - 0.4)), 8192)
        assert bayes.variance_circular(sharp, 0.4) == pytest.approx(0.0, abs=1e-2)

    def test_pi_shift_invariance(self):
        d = GridDistribution.from_function(
            Circle(-math.pi, math.pi), lambda t: np.exp(np.cos(t)), 2048)
        assert bayes.variance_circular(d, 0.3) == pytest.approx(
            bayes.variance_circular(d, 0.3 + math.pi), rel=1e-12)

    def test_posterior_variance_closed_form(self):
        alpha, babs = 1.0, 1.0
        prior = GridDistribution.uniform(Circle(-math.pi, math.pi))
        post = bayes.grid_update(
            prior, lambda t, m: phase.coherent_het_likelihood(alpha, m, t), complex(babs))
        got = bayes.variance_circular(post, bayes.circular_mean(post))
        assert got == pytest.approx(phase.coherent_het_posterior_variance(alpha, babs),
                                    abs=1e-10)


class TestInformation:
    def test_gaussian_prior_fisher(self):
        assert bayes.fisher_information_prior(GaussianPrior(0.3, 1.0)) == 1.0
        assert bayes.fisher_information_prior(GaussianPrior(0.0, 0.25)) == 4.0

    def test_grid_fisher(self):
        d = GridDistribution.from_gaussian(GaussianPrior(0.0, 0.25), 4001)
        assert bayes.fisher_information_prior(d) == pytest.approx(4.0, abs=1e-3)

    def test_van_trees(self):
        assert bayes.van_trees_bound(1.0, 4.0) == pytest.approx(0.2)
        assert bayes.van_trees_bound(1.0, 2.0) == pytest.approx(1.0 / 3.0)
        assert bayes.van_trees_bound(2.5, 0.0) == pytest.approx(0.4)
        with pytest.raises(ValueError):
            bayes.van_trees_bound(0.0, 0.0)
        with pytest.raises(ValueError):
            bayes.van_trees_bound(-1.0, 1.0)


class TestEngines:
    def test_quadrature_matches_closed_forms(self):
        res = disp.het_avg_total_variance_numeric(0.25, 0.0)
        assert res.value == pytest.approx(1.0 / 3.0, abs=1e-6)
        res = disp.hom_avg_variance_q_numeric(1.0, 0.0)
        assert res.value == pytest.approx(0.2, abs=1e-6)

    def test_phase_heterodyne_closed_form(self):
        from gaussbayes.measurement import HETERODYNE
        task = phase.PhaseTask(ProbeSpec(1.0), HETERODYNE)
        res = phase.average_variance_numeric(task)
        assert res.value == pytest.approx((1 - math.exp(-1.0)) / 2.0, abs=1e-6)

    def test_vacuum_homodyne_is_half(self):
        from gaussbayes.measurement import homodyne
        task = phase.PhaseTask(ProbeSpec(0.0), homodyne())
        assert phase.average_variance_numeric(task).value == pytest.approx(0.5, abs=1e-6)

    def test_monte_carlo_agrees_with_quadrature(self):
        # shared test points across the three problem families
        strat = disp.HeterodyneCoordinateStrategy(0.5, 0.3, "R")
        prior = GridDistribution.from_gaussian(strat.prior, 2001, 8.0)
        quad = average_posterior_variance(strat, prior)
        mc = average_posterior_variance(strat, prior, method="montecarlo",
                                        samples=20_000, rng=rng_for(10))
        assert abs(mc.value - quad.value) <= 4.0 * math.hypot(mc.std_error,
                                                              quad.std_error) + 1e-9
        from gaussbayes.measurement import HETERODYNE
        task = phase.PhaseTask(ProbeSpec(1.0), HETERODYNE)
        quad = phase.average_variance_numeric(task)
        mc = phase.average_variance_numeric(task, method="montecarlo",
                                            samples=20_000, rng=rng_for(11))
        assert abs(mc.value - quad.value) <= 4.0 * math.hypot(mc.std_error, quad.std_error)
        stask = sq.SqueezeTask(ProbeSpec(1.5, 0.4, 0.0), GaussianPrior(-0.5, 1.0))
        quad = sq.average_variance(stask)
        mc = sq.average_variance(stask, method="montecarlo", samples=20_000,
                                 rng=rng_for(12))
        assert abs(mc.value - quad.value) <= 4.0 * math.hypot(mc.std_error, quad.std_error)

    def test_average_variance_never_exceeds_prior_spread(self):
        # linear case: bounded by the prior variance; circular: by 1/2
        strat = disp.HomodyneQuadratureStrategy(0.7, 0.2)
        prior = GridDistribution.from_gaussian(strat.prior, 2001, 8.0)
        assert average_posterior_variance(strat, prior).value <= 0.7
        from gaussbayes.measurement import homodyne
        for alpha in (0.0, 0.6, 2.0):
            task = phase.PhaseTask(ProbeSpec(alpha), homodyne())
            assert phase.average_variance_numeric(task).value <= 0.5 + 1e-9

    def test_tolerance_error_carries_estimate(self):
        strat = disp.HeterodyneCoordinateStrategy(0.25, 0.0, "R")
        prior = GridDistribution.from_gaussian(strat.prior, 2001, 8.0)
        with pytest.raises(ToleranceError) as err:
            average_posterior_variance(strat, prior, max_level=0)
        assert err.value.estimate == pytest.approx(1.0 / 6.0, abs=1e-4)

    def test_montecarlo_requires_rng(self):
        strat = disp.HeterodyneCoordinateStrategy(0.25, 0.0, "R")
        prior = GridDistribution.from_gaussian(strat.prior, 201, 8.0)
        with pytest.raises(ValueError):
            average_posterior_variance(strat, prior, method="montecarlo", samples=10)
