"""Sequential Bayesian optimization of a scalar black box.

Latin-hypercube initialization, a Matern-5/2 GP surrogate refit after
every observation, Expected-Improvement acquisition maximized by
bounded multi-start local ascent, and a final report at the maximum of
the posterior mean over a dense grid (with local refinement).

The evaluation budget is exact: n_init + n_iter objective calls, never
more. Everything is deterministic under (objective, config, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import gp
from .special import std_normal_cdf, std_normal_pdf

__all__ = [
    "BayesOptConfig",
    "BoQuery",
    "BoTrace",
    "BayesOptError",
    "lhs_sample",
    "expected_improvement",
    "maximize_acquisition",
    "run_bayes_opt",
]


class BayesOptError(RuntimeError):
    """Raised when a run cannot produce a usable result."""


@dataclass(frozen=True)
class BayesOptConfig:
    bounds: tuple[float, float] = (1.5, 8.0)
    n_init: int = 5
    n_iter: int = 10
    restarts: int = 10
    seed: int = 0
    fixed_beta: float = 7.0  # carried for callers that hold beta constant

    def __post_init__(self):
        lo, hi = self.bounds
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError(f"bounds: need lo < hi, got {self.bounds!r}")
        if self.n_init < 2:
            raise ValueError(f"n_init: must be >= 2, got {self.n_init}")
        if self.n_iter < 1:
            raise ValueError(f"n_iter: must be >= 1, got {self.n_iter}")
        if self.restarts < 1:
            raise ValueError(f"restarts: must be >= 1, got {self.restarts}")


@dataclass(frozen=True)
class BoQuery:
    """One objective evaluation with the selection-time posterior snapshot."""

    alpha: float
    value: float
    phase: str  # "init" | "acquisition"
    ei: float | None = None
    mu: float | None = None
    sigma: float | None = None


@dataclass
class BoTrace:
    config: BayesOptConfig
    queries: list[BoQuery] = field(default_factory=list)
    alpha_star: float = float("nan")
    posterior_alpha: np.ndarray | None = None
    posterior_mean: np.ndarray | None = None
    posterior_stddev: np.ndarray | None = None
    error: str | None = None

    @property
    def n_evaluations(self) -> int:
        return len(self.queries)


def lhs_sample(n: int, bounds: tuple[float, float], seed: int) -> np.ndarray:
    """Latin hypercube sample: one uniform draw per equal stratum of [lo, hi]."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    lo, hi = bounds
    rng = np.random.default_rng(seed)
    strata = rng.permutation(n)
    offsets = rng.random(n)
    return lo + (strata + offsets) / n * (hi - lo)


def expected_improvement(mu: float, sigma: float, f_best: float) -> float:
    """Closed-form EI for maximization; sigma = 0 degenerates to max(mu - f_best, 0)."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma!r}")
    if sigma == 0.0:
        return max(mu - f_best, 0.0)
    z = (mu - f_best) / sigma
    value = (mu - f_best) * std_normal_cdf(z) + sigma * std_normal_pdf(z)
    return max(value, 0.0)


def _ei_at(model: gp.GpModel, x: float, f_best: float) -> float:
    mu, sigma = gp.posterior(model, x)
    return expected_improvement(mu, sigma, f_best)


def maximize_acquisition(
    model: gp.GpModel, bounds: tuple[float, float], restarts: int, seed: int
) -> float:
    """Best EI point over `restarts` seeded local ascents within bounds.

    The result's EI is at least the EI of every restart's start point;
    failed local searches fall back to the sampled starts.
    """
    lo, hi = bounds
    f_best = float(np.max(model.y))
    rng = np.random.default_rng(seed)
    starts = rng.uniform(lo, hi, size=restarts)

    candidates = list(starts)
    for start in starts:
        try:
            result = minimize(
                lambda a: -_ei_at(model, float(np.clip(a[0], lo, hi)), f_best),
                np.array([start]),
                method="L-BFGS-B",
                bounds=[(lo, hi)],
            )
            candidates.append(float(np.clip(result.x[0], lo, hi)))
        except Exception:
            pass

    values = [_ei_at(model, c, f_best) for c in candidates]
    return float(candidates[int(np.argmax(values))])


def _argmax_posterior_mean(model: gp.GpModel, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    grid = np.linspace(lo, hi, 2001)
    mean, _ = gp.posterior_many(model, grid)
    best = float(grid[int(np.argmax(mean))])
    try:
        result = minimize(
            lambda a: -gp.posterior(model, float(np.clip(a[0], lo, hi)))[0],
            np.array([best]),
            method="L-BFGS-B",
            bounds=[(lo, hi)],
        )
        refined = float(np.clip(result.x[0], lo, hi))
        if gp.posterior(model, refined)[0] >= gp.posterior(model, best)[0]:
            return refined
    except Exception:
        pass
    return best


def run_bayes_opt(objective, config: BayesOptConfig) -> BoTrace:
    """Run the full loop: LHS init, EI acquisitions, posterior-mean report.

    On an objective failure the trace is truncated with an error record;
    fewer than two successful evaluations raise BayesOptError.
    """
    trace = BoTrace(config=config)

    def observe(alpha: float, phase: str, ei=None, mu=None, sigma=None) -> bool:
        try:
            value = float(objective(alpha))
        except Exception as err:  # noqa: BLE001 - black box may fail arbitrarily
            trace.error = f"objective failed at alpha={alpha!r}: {err}"
            return False
        trace.queries.append(
            BoQuery(alpha=float(alpha), value=value, phase=phase, ei=ei, mu=mu, sigma=sigma)
        )
        return True

    init_points = lhs_sample(config.n_init, config.bounds, _child_seed(config.seed, 0))
    for alpha in init_points:
        if not observe(float(alpha), "init"):
            break

    model = None
    if trace.error is None:
        model = _refit(trace, config)
        for k in range(config.n_iter):
            alpha = maximize_acquisition(
                model, config.bounds, config.restarts, _child_seed(config.seed, 1 + k)
            )
            mu, sigma = gp.posterior(model, alpha)
            ei = expected_improvement(mu, sigma, float(np.max(model.y)))
            if not observe(alpha, "acquisition", ei=ei, mu=mu, sigma=sigma):
                break
            model = _refit(trace, config)

    if len(trace.queries) < 2:
        raise BayesOptError(f"fewer than 2 successful evaluations: {trace.error}")
    if model is None:
        model = _refit(trace, config)

    trace.alpha_star = _argmax_posterior_mean(model, config.bounds)
    grid = np.linspace(config.bounds[0], config.bounds[1], 201)
    mean, stddev = gp.posterior_many(model, grid)
    trace.posterior_alpha = grid
    trace.posterior_mean = mean
    trace.posterior_stddev = stddev
    return trace


def _child_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _refit(trace: BoTrace, config: BayesOptConfig) -> gp.GpModel:
    observations = [(q.alpha, q.value) for q in trace.queries]
    return gp.fit(
        observations,
        input_range=config.bounds,
        seed=_child_seed(config.seed, 10_000),
    )
