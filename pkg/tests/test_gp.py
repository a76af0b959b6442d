import math

import numpy as np
import pytest

from scdiff import gp


def dense_posterior_oracle(xs, ys, hp, query):
    """Explicit-inverse GP posterior with mean-centering, no Cholesky."""
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    y_mean = ys.mean()
    k = np.array([[gp.matern52(a, b, hp) for b in xs] for a in xs])
    k += hp.noise_var * np.eye(len(xs))
    kinv = np.linalg.inv(k)
    kstar = np.array([gp.matern52(query, b, hp) for b in xs])
    mu = y_mean + kstar @ kinv @ (ys - y_mean)
    var = hp.signal_var - kstar @ kinv @ kstar
    return mu, math.sqrt(max(var, 0.0))


class TestMatern52:
    def test_zero_lag(self):
        hp = gp.GpHyperparams(1.3, 2.7, 0.0)
        assert gp.matern52(4.0, 4.0, hp) == 2.7

    def test_at_one_length_scale(self):
        # frozen: (1 + sqrt5 + 5/3) exp(-sqrt5)
        hp = gp.GpHyperparams(1.0, 1.0, 0.0)
        assert gp.matern52(0.0, 1.0, hp) == pytest.approx(0.5239941088318203, rel=1e-14)

    def test_symmetry(self):
        hp = gp.GpHyperparams(0.7, 1.9, 0.0)
        rng = np.random.default_rng(0)
        for _ in range(20):
            a, b = rng.uniform(-5, 5, 2)
            assert gp.matern52(a, b, hp) == gp.matern52(b, a, hp)

    def test_decays_to_zero(self):
        hp = gp.GpHyperparams(0.5, 1.0, 0.0)
        assert gp.matern52(0.0, 50.0, hp) < 1e-30

    def test_invalid_hyperparams(self):
        with pytest.raises(ValueError, match="length_scale"):
            gp.GpHyperparams(0.0, 1.0, 0.0)
        with pytest.raises(ValueError, match="signal_var"):
            gp.GpHyperparams(1.0, -1.0, 0.0)
        with pytest.raises(ValueError, match="noise_var"):
            gp.GpHyperparams(1.0, 1.0, -0.1)


class TestFit:
    def test_recovers_length_scale_within_factor_two(self):
        rng = np.random.default_rng(42)
        xs = np.sort(rng.uniform(0, 5, 30))
        hp_true = gp.GpHyperparams(1.0, 1.0, 0.01)
        cov = np.array([[gp.matern52(a, b, hp_true) for b in xs] for a in xs])
        ys = rng.multivariate_normal(np.zeros(30), cov + 0.01 * np.eye(30))
        model = gp.fit(list(zip(xs, ys)))
        assert 0.5 <= model.hyperparams.length_scale <= 2.0

    def test_two_point_likelihood_matches_brute_force(self):
        obs = [(0.3, 1.1), (1.7, -0.4)]
        hp = gp.GpHyperparams(0.9, 1.4, 0.05)
        model = gp.make_model(obs, hp)
        # brute force via the 2x2 determinant/inverse formulas
        ys = np.array([1.1, -0.4])
        yc = ys - ys.mean()
        k00 = hp.signal_var + hp.noise_var
        k01 = gp.matern52(0.3, 1.7, hp)
        det = k00 * k00 - k01 * k01
        quad = (k00 * (yc[0] ** 2 + yc[1] ** 2) - 2 * k01 * yc[0] * yc[1]) / det
        expected = -0.5 * quad - 0.5 * math.log(det) - math.log(2 * math.pi)
        assert model.log_likelihood == pytest.approx(expected, abs=1e-9)

    def test_noiseless_fit_interpolates(self):
        obs = [(0.0, 0.1), (1.0, 0.9), (2.5, -0.3), (4.0, 0.5), (5.0, 0.2)]
        model = gp.fit(obs, fixed_noise_var=1e-10)
        for x, y in obs:
            mu, _ = gp.posterior(model, x)
            assert mu == pytest.approx(y, abs=1e-6)

    def test_fitted_likelihood_beats_every_start(self):
        rng = np.random.default_rng(3)
        xs = rng.uniform(0, 3, 12)
        ys = np.sin(xs) + 0.05 * rng.standard_normal(12)
        model = gp.fit(list(zip(xs, ys)), seed=5)
        # refitting from the fitted hyperparams cannot do better than the fit
        refit = gp.make_model(list(zip(xs, ys)), model.hyperparams)
        assert refit.log_likelihood <= model.log_likelihood + 1e-9

    def test_degenerate_inputs_rejected(self):
        with pytest.raises(gp.FitError, match="identical"):
            gp.fit([(2.0, 1.0), (2.0, 1.1), (2.0, 0.9)])

    def test_too_few_observations_rejected(self):
        with pytest.raises(gp.FitError):
            gp.fit([(1.0, 1.0)])


class TestPosterior:
    def test_far_from_data_reverts_to_prior(self):
        # zero-mean data: the posterior mean reverts to ~0 and the stddev
        # to the prior signal stddev
        hp = gp.GpHyperparams(0.5, 1.44, 0.0)
        obs = [(0.0, 0.3), (1.0, -0.3)]
        model = gp.make_model(obs, hp)
        mu, sigma = gp.posterior(model, 1.0 + 20 * hp.length_scale)
        assert abs(mu) < 1e-6 * 0.3
        assert sigma == pytest.approx(1.2, rel=1e-6)

    def test_far_from_data_reverts_to_observation_mean(self):
        hp = gp.GpHyperparams(0.5, 1.0, 0.0)
        obs = [(0.0, 5.3), (1.0, 4.7)]
        model = gp.make_model(obs, hp)
        mu, _ = gp.posterior(model, 30.0)
        assert mu == pytest.approx(5.0, abs=1e-9)

    def test_single_noiseless_observation(self):
        model = gp.make_model([(2.0, 5.0)], gp.GpHyperparams(1.0, 2.0, 0.0))
        mu, sigma = gp.posterior(model, 2.0)
        assert mu == pytest.approx(5.0, abs=1e-9)
        assert sigma == pytest.approx(0.0, abs=1e-4)

    def test_three_point_dense_oracle(self):
        hp = gp.GpHyperparams(0.8, 1.3, 0.02)
        obs = [(0.0, 0.4), (1.2, -0.9), (2.9, 0.7)]
        model = gp.make_model(obs, hp)
        for query in [-0.5, 0.6, 1.2, 2.0, 3.5]:
            mu, sigma = gp.posterior(model, query)
            mu_ref, sigma_ref = dense_posterior_oracle(
                [o[0] for o in obs], [o[1] for o in obs], hp, query
            )
            assert mu == pytest.approx(mu_ref, abs=1e-9)
            assert sigma == pytest.approx(sigma_ref, abs=1e-9)

    def test_variance_never_exceeds_prior(self):
        rng = np.random.default_rng(7)
        hp = gp.GpHyperparams(0.6, 2.0, 0.1)
        obs = list(zip(rng.uniform(0, 4, 10), rng.standard_normal(10)))
        model = gp.make_model(obs, hp)
        _, sigmas = gp.posterior_many(model, np.linspace(-2, 6, 200))
        assert np.all(sigmas**2 <= hp.signal_var + hp.noise_var + 1e-12)

    def test_information_is_monotone(self):
        # adding an observation never increases the predictive variance
        rng = np.random.default_rng(8)
        hp = gp.GpHyperparams(0.7, 1.0, 0.05)
        xs = rng.uniform(0, 4, 8)
        ys = np.cos(xs)
        queries = np.linspace(-1, 5, 50)
        for n in range(1, 8):
            before = gp.make_model(list(zip(xs[:n], ys[:n])), hp)
            after = gp.make_model(list(zip(xs[: n + 1], ys[: n + 1])), hp)
            _, s_before = gp.posterior_many(before, queries)
            _, s_after = gp.posterior_many(after, queries)
            assert np.all(s_after**2 <= s_before**2 + 1e-9)
