import numpy as np
import pytest

from scdiff.fixtures import (
    SyntheticEvaluator,
    brute_convolve,
    grid_search_oracle,
    mc_expected_improvement,
    peak_scores,
    random_feature_map,
)


class TestGridSearchOracle:
    def test_single_point_grid(self):
        out = grid_search_oracle(lambda a, b: a + b, lambda a, b: -1.0, [2.0], [3.0])
        assert out.found and out.alpha == 2.0 and out.beta == 3.0 and out.score == 5.0

    def test_infeasible_everywhere(self):
        out = grid_search_oracle(lambda a, b: a, lambda a, b: 1.0, [1.0, 2.0], [1.0])
        assert not out.found
        assert out.alpha is None

    def test_ties_break_low_alpha_then_low_beta(self):
        out = grid_search_oracle(
            lambda a, b: 1.0, lambda a, b: -1.0, [3.0, 1.0, 2.0], [5.0, 4.0]
        )
        assert (out.alpha, out.beta) == (1.0, 4.0)

    def test_constrained_optimum_on_peak(self):
        objective = lambda a, b: peak_scores(a, b)[0]
        constraint = lambda a, b: 0.7 - peak_scores(a, b)[1]
        out = grid_search_oracle(
            objective, constraint, np.linspace(1.5, 8.0, 50), np.linspace(6.0, 12.0, 50)
        )
        assert out.found
        assert peak_scores(out.alpha, out.beta)[1] >= 0.7

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            grid_search_oracle(lambda a, b: 0.0, lambda a, b: -1.0, [], [1.0])


class TestBruteConvolve:
    def test_centered_delta_is_identity(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((8, 8))
        delta = np.zeros((8, 8))
        delta[4, 4] = 1.0
        assert np.allclose(brute_convolve(x, delta), x, atol=1e-15)

    def test_all_ones_kernel_sums_input(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((6, 6))
        out = brute_convolve(x, np.ones((6, 6)))
        assert np.allclose(out, x.sum(), atol=1e-12)

    def test_matches_fft_convolution(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((16, 16))
        kernel = rng.standard_normal((16, 16))
        direct = brute_convolve(x, kernel)
        via_fft = np.fft.ifft2(
            np.fft.fft2(x) * np.fft.fft2(np.fft.ifftshift(kernel))
        ).real
        assert np.allclose(direct, via_fft, atol=1e-9)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            brute_convolve(np.zeros((4, 4)), np.zeros((5, 5)))


class TestMcExpectedImprovement:
    def test_sigma_zero_exact(self):
        assert mc_expected_improvement(0.7, 0.0, 0.5, 10, seed=0) == pytest.approx(0.2)
        assert mc_expected_improvement(0.3, 0.0, 0.5, 10, seed=0) == 0.0

    def test_monotone_in_mu(self):
        values = [
            mc_expected_improvement(mu, 0.5, 0.0, 200_000, seed=4) for mu in (-0.5, 0.0, 0.5)
        ]
        assert values[0] < values[1] < values[2]

    def test_deterministic_under_seed(self):
        a = mc_expected_improvement(0.1, 1.0, 0.0, 1000, seed=5)
        b = mc_expected_improvement(0.1, 1.0, 0.0, 1000, seed=5)
        assert a == b

    def test_rejects_zero_samples(self):
        with pytest.raises(ValueError):
            mc_expected_improvement(0.0, 1.0, 0.0, 0, seed=0)


class TestSyntheticEvaluators:
    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError, match="unknown synthetic evaluator"):
            SyntheticEvaluator("frobnicator")

    def test_random_feature_map_deterministic(self):
        a = random_feature_map(1, 2, 4, 4, seed=3)
        b = random_feature_map(1, 2, 4, 4, seed=3)
        assert np.array_equal(a, b)
        assert a.shape == (1, 2, 4, 4)

    def test_peak_formula_direct(self):
        s_text, s_img = peak_scores(4.2, 8.5)
        assert s_text == pytest.approx(0.32, abs=1e-15)
        assert s_img == pytest.approx(0.84, abs=1e-15)
