"""Visual-semantic objective and the two-stage parameter search.

The black-box evaluator maps a request (amplification alpha, window
shape beta, radius, block tag, seed, prompt) to a pair of CLIP-style
cosine similarities: s_text (prompt vs generated image) and s_img
(original vs generated image). The score to maximize is

    vsml_score = s_text + diversity_weight * (1 - s_img)

subject to s_img >= min_image_similarity (the safety margin against
rewarding severely distorted images).

Stage 1 tunes alpha with Bayesian optimization at a fixed beta, without
the constraint; stage 2 refines beta with constrained SPSA at the
chosen alpha. A single confirmation evaluation at the reported point
sets the feasibility flag.

Because stage 1 ignores the constraint while its queries still observe
s_img, the final alpha is selected as the maximum of the posterior mean
over the sub-interval predicted feasible by a companion GP fit to the
observed s_img values (with a small safety margin); when nothing is
predicted feasible the unrestricted maximum is used and stage 2 / the
confirmation flag report the infeasibility.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import gp
from .bayesopt import BayesOptConfig, BayesOptError, BoTrace, run_bayes_opt
from .spsa import SpsaConfig, SpsaError, SpsaTrace, run_spsa

__all__ = [
    "BLOCK_TAGS",
    "EvalRequest",
    "EvalResult",
    "EvaluatorError",
    "TransportError",
    "ContractError",
    "EvaluationFailed",
    "SearchConfig",
    "SearchResult",
    "vsml_score",
    "similarity_constraint",
    "evaluate",
    "hierarchical_search",
    "search_result_to_dict",
]

BLOCK_TAGS = ("down0", "down1", "down2", "mid")


class EvaluatorError(Exception):
    """Base class for evaluator failures."""


class TransportError(EvaluatorError):
    """Process, handshake, or timeout failure reaching the evaluator."""


class ContractError(EvaluatorError):
    """The evaluator answered but violated the protocol or score range."""


class EvaluationFailed(EvaluatorError):
    """The evaluator reported an application-level error for a request."""


@dataclass(frozen=True)
class EvalRequest:
    alpha: float
    beta: float
    r: float
    block: str = "down1"
    cx: float = 0.0
    cy: float = 0.0
    seed: int = 0
    prompt: str = ""

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise ValueError("alpha and beta must be finite")
        if not (np.isfinite(self.r) and self.r > 0):
            raise ValueError(f"r: must be positive, got {self.r!r}")
        if self.block not in BLOCK_TAGS:
            raise ValueError(f"block: must be one of {BLOCK_TAGS}, got {self.block!r}")
        if not (isinstance(self.seed, (int, np.integer)) and self.seed >= 0):
            raise ValueError(f"seed: must be a non-negative integer, got {self.seed!r}")


@dataclass(frozen=True)
class EvalResult:
    s_text: float
    s_img: float
    latency_ms: int
    evaluator_id: str


def vsml_score(s_text: float, s_img: float, diversity_weight: float = 1.0) -> float:
    """Text alignment plus weighted visual novelty: s_text + w*(1 - s_img)."""
    return s_text + diversity_weight * (1.0 - s_img)


def similarity_constraint(s_img: float, min_similarity: float) -> float:
    """Constraint value min_similarity - s_img; feasible iff <= 0."""
    return min_similarity - s_img


def evaluate(evaluator, request: EvalRequest) -> EvalResult:
    """Run one evaluation and validate the returned scores.

    Scores outside [-1, 1] raise ContractError; transport problems
    surface as TransportError from the evaluator itself.
    """
    t0 = time.perf_counter()
    s_text, s_img = evaluator.score(request)
    latency_ms = max(0, int(round((time.perf_counter() - t0) * 1000)))
    for name, value in (("s_text", s_text), ("s_img", s_img)):
        if not np.isfinite(value) or not -1.0 <= value <= 1.0:
            raise ContractError(f"{name}={value!r} outside cosine-similarity range [-1, 1]")
    return EvalResult(
        s_text=float(s_text),
        s_img=float(s_img),
        latency_ms=latency_ms,
        evaluator_id=getattr(evaluator, "name", evaluator.__class__.__name__),
    )


@dataclass(frozen=True)
class SearchConfig:
    diversity_weight: float = 1.0
    min_image_similarity: float = 0.7
    feasibility_margin: float = 0.01
    radius: float = 15.0
    block: str = "down1"
    center: tuple[float, float] = (32.0, 32.0)
    prompt: str = "a photo of a creative object."
    request_seed: int = 0
    stage1: BayesOptConfig = field(default_factory=BayesOptConfig)
    stage2: SpsaConfig = field(default_factory=SpsaConfig)

    def __post_init__(self):
        if not -1.0 < self.min_image_similarity < 1.0:
            raise ValueError(
                f"min_image_similarity: must be in (-1, 1), got {self.min_image_similarity!r}"
            )
        if self.diversity_weight < 0:
            raise ValueError(f"diversity_weight: must be >= 0, got {self.diversity_weight!r}")
        if self.feasibility_margin < 0:
            raise ValueError(f"feasibility_margin: must be >= 0, got {self.feasibility_margin!r}")
        if self.block not in BLOCK_TAGS:
            raise ValueError(f"block: must be one of {BLOCK_TAGS}, got {self.block!r}")
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius: must be positive, got {self.radius!r}")


@dataclass
class SearchResult:
    alpha_star: float
    beta_star: float
    feasible: bool
    score: float
    confirmation: EvalResult
    confirmation_constraint: float
    bo_trace: BoTrace
    spsa_trace: SpsaTrace | None
    config: SearchConfig
    alpha_star_posterior: float
    feasibility_restricted: bool
    stage1_scores: list[tuple[float, float, float]]  # (alpha, s_text, s_img)
    n_evaluator_calls: int
    stage2_error: str | None = None
    evaluator_concurrent: bool = False


class _CountingEvaluator:
    def __init__(self, evaluator):
        self._evaluator = evaluator
        self.calls = 0
        self.name = getattr(evaluator, "name", evaluator.__class__.__name__)
        self.concurrent = getattr(evaluator, "concurrent", False)

    def score(self, request: EvalRequest):
        self.calls += 1
        return self._evaluator.score(request)


def _select_feasible_alpha(
    trace: BoTrace,
    stage1_scores: list[tuple[float, float, float]],
    config: SearchConfig,
) -> tuple[float, bool]:
    """Posterior-mean argmax restricted to the predicted-feasible interval.

    Falls back to the unrestricted argmax when no grid point is
    predicted to satisfy the similarity floor plus margin.
    """
    bounds = config.stage1.bounds
    threshold = config.min_image_similarity + config.feasibility_margin
    score_obs = [(a, vsml_score(st, si, config.diversity_weight)) for a, st, si in stage1_scores]
    sim_obs = [(a, si) for a, st, si in stage1_scores]
    try:
        score_model = gp.fit(score_obs, input_range=bounds, seed=config.stage1.seed)
        sim_model = gp.fit(sim_obs, input_range=bounds, seed=config.stage1.seed)
    except gp.FitError:
        return trace.alpha_star, False
    grid = np.linspace(bounds[0], bounds[1], 2001)
    score_mean, _ = gp.posterior_many(score_model, grid)
    sim_mean, _ = gp.posterior_many(sim_model, grid)
    feasible = sim_mean >= threshold
    if not np.any(feasible):
        return trace.alpha_star, False
    if feasible[int(np.argmax(score_mean))]:
        # The restriction does not bind; keep the refined BO answer.
        return trace.alpha_star, False
    idx = int(np.argmax(np.where(feasible, score_mean, -np.inf)))
    return float(grid[idx]), True


def hierarchical_search(evaluator, config: SearchConfig) -> SearchResult:
    """Two-stage search: BO over alpha at fixed beta, then constrained
    SPSA over beta at the selected alpha, then one confirmation call."""
    counting = _CountingEvaluator(evaluator)
    cx, cy = config.center
    stage1_scores: list[tuple[float, float, float]] = []

    def request_for(alpha: float, beta: float) -> EvalRequest:
        return EvalRequest(
            alpha=float(alpha),
            beta=float(beta),
            r=config.radius,
            block=config.block,
            cx=cx,
            cy=cy,
            seed=config.request_seed,
            prompt=config.prompt,
        )

    def stage1_objective(alpha: float) -> float:
        result = evaluate(counting, request_for(alpha, config.stage1.fixed_beta))
        stage1_scores.append((float(alpha), result.s_text, result.s_img))
        return vsml_score(result.s_text, result.s_img, config.diversity_weight)

    bo_trace = run_bayes_opt(stage1_objective, config.stage1)
    if bo_trace.error is not None:
        raise BayesOptError(f"stage 1 aborted: {bo_trace.error}")
    alpha_star, restricted = _select_feasible_alpha(bo_trace, stage1_scores, config)

    def stage2_objective(beta: float) -> float:
        result = evaluate(counting, request_for(alpha_star, beta))
        return vsml_score(result.s_text, result.s_img, config.diversity_weight)

    def stage2_constraint(beta: float) -> float:
        result = evaluate(counting, request_for(alpha_star, beta))
        return similarity_constraint(result.s_img, config.min_image_similarity)

    spsa_trace: SpsaTrace | None = None
    stage2_error: str | None = None
    try:
        spsa_trace = run_spsa(stage2_objective, stage2_constraint, config.stage2)
        beta_star = spsa_trace.beta_star
    except (SpsaError, EvaluatorError) as err:
        stage2_error = str(err)
        beta_star = config.stage2.beta0

    confirmation = evaluate(counting, request_for(alpha_star, beta_star))
    constraint_value = similarity_constraint(confirmation.s_img, config.min_image_similarity)
    return SearchResult(
        alpha_star=float(alpha_star),
        beta_star=float(beta_star),
        feasible=constraint_value <= 0.0,
        score=vsml_score(confirmation.s_text, confirmation.s_img, config.diversity_weight),
        confirmation=confirmation,
        confirmation_constraint=float(constraint_value),
        bo_trace=bo_trace,
        spsa_trace=spsa_trace,
        config=config,
        alpha_star_posterior=float(bo_trace.alpha_star),
        feasibility_restricted=restricted,
        stage1_scores=stage1_scores,
        n_evaluator_calls=counting.calls,
        stage2_error=stage2_error,
        evaluator_concurrent=counting.concurrent,
    )


def _finite_or_none(value) -> float | None:
    if value is None:
        return None
    value = float(value)
    return value if np.isfinite(value) else None


def search_result_to_dict(result: SearchResult) -> dict:
    """JSON-ready dict, schema "scdiff-search/1".

    Deliberately excludes latencies so output is byte-identical across
    runs with the same seed.
    """
    config = result.config
    bo = result.bo_trace
    score_by_alpha = {a: (st, si) for a, st, si in result.stage1_scores}
    queries = []
    for q in bo.queries:
        st_si = score_by_alpha.get(q.alpha)
        queries.append(
            {
                "alpha": q.alpha,
                "value": q.value,
                "phase": q.phase,
                "ei": _finite_or_none(q.ei),
                "mu": _finite_or_none(q.mu),
                "sigma": _finite_or_none(q.sigma),
                "s_text": st_si[0] if st_si else None,
                "s_img": st_si[1] if st_si else None,
            }
        )
    stage1 = {
        "alpha_star_posterior": result.alpha_star_posterior,
        "alpha_star_selected": result.alpha_star,
        "feasibility_restricted": result.feasibility_restricted,
        "queries": queries,
        "posterior_grid": {
            "alpha": [float(v) for v in bo.posterior_alpha],
            "mean": [float(v) for v in bo.posterior_mean],
            "stddev": [float(v) for v in bo.posterior_stddev],
        }
        if bo.posterior_alpha is not None
        else None,
        "error": bo.error,
    }

    stage2 = None
    if result.spsa_trace is not None:
        trace = result.spsa_trace
        stage2 = {
            "beta_star": _finite_or_none(trace.beta_star),
            "feasible": trace.feasible,
            "best_value": _finite_or_none(trace.best_value),
            "runs": [
                {
                    "seed": run.seed,
                    "initial_beta": run.initial_beta,
                    "initial_g": _finite_or_none(run.initial_g),
                    "best_beta": _finite_or_none(run.best_beta),
                    "best_value": _finite_or_none(run.best_value),
                    "min_violation_beta": _finite_or_none(run.min_violation_beta),
                    "min_violation_g": _finite_or_none(run.min_violation_g),
                    "n_objective_evals": run.n_objective_evals,
                    "n_constraint_evals": run.n_constraint_evals,
                    "error": run.error,
                    "steps": [
                        {
                            "t": step.t,
                            "beta": step.beta,
                            "objective_estimate": step.objective_estimate,
                            "backtracks": step.backtracks,
                            "stalled": step.stalled,
                            "next_beta": step.next_beta,
                            "cycles": [
                                {
                                    "delta": cycle.delta,
                                    "probe_plus": cycle.probe_plus,
                                    "probe_minus": cycle.probe_minus,
                                    "f_plus": cycle.f_plus,
                                    "f_minus": cycle.f_minus,
                                    "gradient": cycle.gradient,
                                    "step_size": cycle.step_size,
                                    "candidate": cycle.candidate,
                                    "g_candidate": cycle.g_candidate,
                                    "accepted": cycle.accepted,
                                }
                                for cycle in step.cycles
                            ],
                        }
                        for step in run.steps
                    ],
                }
                for run in trace.runs
            ],
        }

    return {
        "schema": "scdiff-search/1",
        "alpha_star": result.alpha_star,
        "beta_star": result.beta_star,
        "feasible": result.feasible,
        "score": result.score,
        "confirmation": {
            "alpha": result.alpha_star,
            "beta": result.beta_star,
            "s_text": result.confirmation.s_text,
            "s_img": result.confirmation.s_img,
            "score": result.score,
            "constraint": result.confirmation_constraint,
        },
        "evaluator": {
            "id": result.confirmation.evaluator_id,
            "concurrent": result.evaluator_concurrent,
        },
        "n_evaluator_calls": result.n_evaluator_calls,
        "stage2_error": result.stage2_error,
        "config": {
            "diversity_weight": config.diversity_weight,
            "min_image_similarity": config.min_image_similarity,
            "feasibility_margin": config.feasibility_margin,
            "radius": config.radius,
            "block": config.block,
            "center": [config.center[0], config.center[1]],
            "prompt": config.prompt,
            "request_seed": config.request_seed,
            "stage1": {
                "bounds": list(config.stage1.bounds),
                "n_init": config.stage1.n_init,
                "n_iter": config.stage1.n_iter,
                "restarts": config.stage1.restarts,
                "seed": config.stage1.seed,
                "fixed_beta": config.stage1.fixed_beta,
            },
            "stage2": {
                "beta0": config.stage2.beta0,
                "bounds": list(config.stage2.bounds),
                "iterations": config.stage2.iterations,
                "a": config.stage2.a,
                "gain_exponent": config.stage2.gain_exponent,
                "c": config.stage2.c,
                "gamma": config.stage2.gamma,
                "n_runs": config.stage2.n_runs,
                "max_backtracks": config.stage2.max_backtracks,
                "seed": config.stage2.seed,
            },
        },
        "stage1": stage1,
        "stage2": stage2,
    }
