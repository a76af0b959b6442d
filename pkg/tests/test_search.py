import numpy as np
import pytest

from scdiff.bayesopt import BayesOptConfig
from scdiff.fixtures import (
    get_synthetic_evaluator,
    grid_search_oracle,
    peak_scores,
)
from scdiff.search import (
    ContractError,
    EvalRequest,
    SearchConfig,
    evaluate,
    hierarchical_search,
    search_result_to_dict,
    similarity_constraint,
    vsml_score,
)
from scdiff.spsa import SpsaConfig


def spsa_call_count(trace):
    return sum(r.n_objective_evals + r.n_constraint_evals for r in trace.runs)


class TestVsmlScore:
    def test_identical_image_adds_nothing(self):
        assert vsml_score(0.3, 1.0, 1.0) == pytest.approx(0.3)

    def test_direct_substitution(self):
        assert vsml_score(0.3, 0.5, 1.0) == pytest.approx(0.8)

    def test_zero_weight(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            st, si = rng.uniform(-1, 1, 2)
            assert vsml_score(st, si, 0.0) == st

    def test_strictly_decreasing_in_similarity(self):
        scores = [vsml_score(0.3, si, 1.0) for si in np.linspace(-1, 1, 20)]
        assert all(a > b for a, b in zip(scores, scores[1:]))


class TestSimilarityConstraint:
    def test_boundary_is_feasible(self):
        assert similarity_constraint(0.7, 0.7) == 0.0

    def test_feasible(self):
        assert similarity_constraint(0.9, 0.7) == pytest.approx(-0.2)

    def test_infeasible(self):
        assert similarity_constraint(0.5, 0.7) == pytest.approx(0.2)


class TestEvaluate:
    def test_peak_probe_values(self):
        request = EvalRequest(alpha=4.2, beta=8.5, r=15.0)
        result = evaluate(get_synthetic_evaluator("peak"), request)
        assert result.s_text == pytest.approx(0.32, abs=1e-12)
        assert result.s_img == pytest.approx(0.84, abs=1e-12)
        assert result.evaluator_id == "peak"
        assert result.latency_ms >= 0

    def test_identity_fixture_alpha_one(self):
        request = EvalRequest(alpha=1.0, beta=7.0, r=15.0)
        result = evaluate(get_synthetic_evaluator("identity"), request)
        assert result.s_img == 1.0
        # the peak formula also satisfies the identity property at alpha = 1
        result = evaluate(get_synthetic_evaluator("peak"), request)
        assert result.s_img == 1.0

    def test_noisy_peak_deterministic_per_request(self):
        ev = get_synthetic_evaluator("noisy-peak")
        r = EvalRequest(alpha=3.0, beta=8.0, r=15.0, seed=7)
        a = evaluate(ev, r)
        b = evaluate(ev, r)
        assert a.s_text == b.s_text
        other = evaluate(ev, EvalRequest(alpha=3.0, beta=8.0, r=15.0, seed=8))
        assert other.s_text != a.s_text

    def test_out_of_range_score_rejected(self):
        class Rogue:
            name = "rogue"
            concurrent = True

            def score(self, request):
                return 1.5, 0.5

        with pytest.raises(ContractError, match="s_text"):
            evaluate(Rogue(), EvalRequest(alpha=2.0, beta=7.0, r=5.0))

    def test_request_validation(self):
        with pytest.raises(ValueError, match="block"):
            EvalRequest(alpha=1.0, beta=7.0, r=5.0, block="up0")
        with pytest.raises(ValueError, match="r:"):
            EvalRequest(alpha=1.0, beta=7.0, r=0.0)
        with pytest.raises(ValueError):
            EvalRequest(alpha=float("nan"), beta=7.0, r=5.0)


def peak_grid_oracle():
    objective = lambda a, b: vsml_score(*peak_scores(a, b), 1.0)
    constraint = lambda a, b: similarity_constraint(peak_scores(a, b)[1], 0.7)
    return grid_search_oracle(
        objective, constraint, np.linspace(1.5, 8.0, 200), np.linspace(6.0, 12.0, 200)
    )


class TestHierarchicalSearch:
    def test_peak_fixture_matches_grid_oracle(self):
        oracle = peak_grid_oracle()
        config = SearchConfig(stage1=BayesOptConfig(seed=0), stage2=SpsaConfig(seed=0))
        result = hierarchical_search(get_synthetic_evaluator("peak"), config)
        assert result.feasible
        assert abs(result.alpha_star - oracle.alpha) < 0.4
        assert abs(result.beta_star - oracle.beta) < 0.8

    def test_identity_fixture_tracks_text_optimum(self):
        config = SearchConfig(stage1=BayesOptConfig(seed=5), stage2=SpsaConfig(seed=5))
        result = hierarchical_search(get_synthetic_evaluator("identity"), config)
        assert result.feasible
        assert not result.feasibility_restricted
        # s_img == 1 collapses the score to s_text whose beta optimum is 8.5
        assert abs(result.beta_star - 8.5) < 0.8

    def test_infeasible_fixture_flagged(self):
        config = SearchConfig(stage1=BayesOptConfig(seed=2), stage2=SpsaConfig(seed=2))
        result = hierarchical_search(get_synthetic_evaluator("infeasible"), config)
        assert not result.feasible

    def test_budget_accounting_exact(self):
        config = SearchConfig(stage1=BayesOptConfig(seed=1), stage2=SpsaConfig(seed=1))
        result = hierarchical_search(get_synthetic_evaluator("peak"), config)
        expected = (
            config.stage1.n_init
            + config.stage1.n_iter
            + spsa_call_count(result.spsa_trace)
            + 1
        )
        assert result.n_evaluator_calls == expected

    def test_stage_separation(self):
        seen = []

        class Spy:
            name = "spy"
            concurrent = True

            def score(self, request):
                seen.append((request.alpha, request.beta))
                return peak_scores(request.alpha, request.beta)

        config = SearchConfig(stage1=BayesOptConfig(seed=3), stage2=SpsaConfig(seed=3))
        result = hierarchical_search(Spy(), config)
        n1 = config.stage1.n_init + config.stage1.n_iter
        stage1 = seen[:n1]
        stage2 = seen[n1:-1]
        assert all(b == config.stage1.fixed_beta for _, b in stage1)
        assert all(a == result.alpha_star for a, _ in stage2)

    def test_feasibility_flag_sound(self):
        for name in ("peak", "identity", "infeasible"):
            config = SearchConfig(stage1=BayesOptConfig(seed=4), stage2=SpsaConfig(seed=4))
            result = hierarchical_search(get_synthetic_evaluator(name), config)
            if result.feasible:
                assert result.confirmation.s_img >= config.min_image_similarity

    def test_stage2_failure_falls_back(self):
        count = [0]
        n1 = 15

        class Flaky:
            name = "flaky"
            concurrent = True

            def score(self, request):
                count[0] += 1
                # fail the initial call of every stage-2 run, then recover
                if n1 < count[0] <= n1 + 5:
                    raise RuntimeError("stage-2 outage")
                return peak_scores(request.alpha, request.beta)

        config = SearchConfig(stage1=BayesOptConfig(seed=6), stage2=SpsaConfig(seed=6))
        result = hierarchical_search(Flaky(), config)
        assert result.stage2_error is not None
        assert result.beta_star == config.stage2.beta0

    def test_serialization_schema(self):
        config = SearchConfig(stage1=BayesOptConfig(seed=7), stage2=SpsaConfig(seed=7))
        result = hierarchical_search(get_synthetic_evaluator("peak"), config)
        doc = search_result_to_dict(result)
        assert doc["schema"] == "scdiff-search/1"
        assert doc["alpha_star"] == result.alpha_star
        assert len(doc["stage1"]["queries"]) == 15
        assert doc["stage1"]["posterior_grid"] is not None
        assert len(doc["stage2"]["runs"]) == config.stage2.n_runs
        import json

        json.dumps(doc)  # must be JSON-clean (no NaN / inf)


class TestSearchConfigValidation:
    def test_bad_tau(self):
        with pytest.raises(ValueError):
            SearchConfig(min_image_similarity=1.5)

    def test_bad_weight(self):
        with pytest.raises(ValueError):
            SearchConfig(diversity_weight=-0.5)

    def test_bad_block(self):
        with pytest.raises(ValueError):
            SearchConfig(block="up1")
