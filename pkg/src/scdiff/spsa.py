"""Constrained SPSA over a scalar parameter with box projection.

Each step estimates a pseudo-gradient from two evaluations at
symmetric +-1 perturbations with decaying magnitude c_t = c / t^gamma,
then takes a projected ascent step of size a_t = a / t^gain_exponent.
A candidate violating the constraint triggers backtracking: the step is
halved and the perturbation resampled, up to `max_backtracks` times,
after which the iterate stalls in place.

Bookkeeping conventions:

- Perturbed probe points are clipped into the box before evaluation;
  accepted iterates are projected into the box.
- The constraint is checked once per candidate (plus once at the
  initial point of each run, so its feasibility status is known).
- The objective value attributed to an iterate is the mean of its first
  probe pair, f(b+c*d)/2 + f(b-c*d)/2 = f(b) + O(c^2); no extra
  objective calls are spent on it. Objective calls per step are exactly
  2 * (1 + backtracks).
- The per-run best is the feasibility-verified visited iterate with the
  highest attributed objective value; the final result is the best
  feasible across runs, or the minimum-violation iterate (flagged
  infeasible) when no run ever saw a feasible point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SpsaConfig",
    "SpsaError",
    "SpsaCycle",
    "SpsaStep",
    "SpsaRun",
    "SpsaTrace",
    "bernoulli_perturbation",
    "pseudo_gradient",
    "spsa_step",
    "run_spsa",
]


class SpsaError(RuntimeError):
    """Raised when no run produces any usable evaluation."""


@dataclass(frozen=True)
class SpsaConfig:
    beta0: float = 8.0
    bounds: tuple[float, float] = (6.0, 12.0)
    iterations: int = 50
    a: float = 0.5
    gain_exponent: float = 0.602
    c: float = 0.1
    gamma: float = 0.101
    n_runs: int = 5
    max_backtracks: int = 8
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.bounds
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError(f"bounds: need lo < hi, got {self.bounds!r}")
        if not (lo <= self.beta0 <= hi):
            raise ValueError(f"beta0: {self.beta0!r} outside bounds {self.bounds!r}")
        if self.iterations < 1:
            raise ValueError(f"iterations: must be >= 1, got {self.iterations}")
        if not (self.a > 0 and self.c > 0):
            raise ValueError("a and c must be positive")
        if not (self.gain_exponent > 0 and self.gamma > 0):
            raise ValueError("gain_exponent and gamma must be positive")
        if self.n_runs < 1:
            raise ValueError(f"n_runs: must be >= 1, got {self.n_runs}")
        if self.max_backtracks < 1:
            raise ValueError(f"max_backtracks: must be >= 1, got {self.max_backtracks}")


@dataclass(frozen=True)
class SpsaCycle:
    """One perturbation/candidate attempt inside a step."""

    delta: int
    probe_plus: float
    probe_minus: float
    f_plus: float
    f_minus: float
    gradient: float
    step_size: float
    candidate: float
    g_candidate: float
    accepted: bool


@dataclass(frozen=True)
class SpsaStep:
    t: int
    beta: float
    objective_estimate: float
    cycles: tuple[SpsaCycle, ...]
    backtracks: int
    stalled: bool
    next_beta: float


@dataclass
class SpsaRun:
    seed: int
    initial_beta: float
    initial_g: float
    steps: list[SpsaStep] = field(default_factory=list)
    best_beta: float | None = None
    best_value: float | None = None
    min_violation_beta: float | None = None
    min_violation_g: float = float("inf")
    n_objective_evals: int = 0
    n_constraint_evals: int = 0
    error: str | None = None


@dataclass
class SpsaTrace:
    config: SpsaConfig
    runs: list[SpsaRun] = field(default_factory=list)
    beta_star: float = float("nan")
    best_value: float = float("nan")
    feasible: bool = False

    @property
    def n_objective_evals(self) -> int:
        return sum(r.n_objective_evals for r in self.runs)

    @property
    def n_constraint_evals(self) -> int:
        return sum(r.n_constraint_evals for r in self.runs)


def bernoulli_perturbation(rng: np.random.Generator) -> int:
    """Draw +1 or -1 with equal probability from the given stream."""
    return int(rng.integers(0, 2)) * 2 - 1


def pseudo_gradient(
    f, beta: float, c_t: float, delta: int, bounds: tuple[float, float] | None = None
) -> float:
    """Two-sided simultaneous-perturbation gradient estimate.

    Probe points are clipped into `bounds` before evaluation when given;
    the divisor stays 2*c_t. Exactly two objective evaluations.
    """
    if c_t <= 0:
        raise ValueError(f"c_t must be positive, got {c_t!r}")
    if delta not in (-1, 1):
        raise ValueError(f"delta must be +1 or -1, got {delta!r}")
    plus = beta + c_t * delta
    minus = beta - c_t * delta
    if bounds is not None:
        plus = float(np.clip(plus, *bounds))
        minus = float(np.clip(minus, *bounds))
    return (f(plus) - f(minus)) / (2.0 * c_t) * delta


def _gains(config: SpsaConfig, t: int) -> tuple[float, float]:
    return config.a / t**config.gain_exponent, config.c / t**config.gamma


def spsa_step(
    beta: float,
    objective,
    constraint,
    t: int,
    config: SpsaConfig,
    rng: np.random.Generator,
) -> SpsaStep:
    """Execute iteration t from `beta`; see the module docstring for the
    backtracking and accounting rules."""
    if t < 1:
        raise ValueError(f"iteration index must be >= 1, got {t}")
    lo, hi = config.bounds
    a_t, c_t = _gains(config, t)
    cycles: list[SpsaCycle] = []
    estimate = None
    next_beta = beta
    stalled = True
    step_size = a_t
    for attempt in range(1 + config.max_backtracks):
        if attempt > 0:
            step_size *= 0.5
        delta = bernoulli_perturbation(rng)
        plus = float(np.clip(beta + c_t * delta, lo, hi))
        minus = float(np.clip(beta - c_t * delta, lo, hi))
        f_plus = float(objective(plus))
        f_minus = float(objective(minus))
        grad = (f_plus - f_minus) / (2.0 * c_t) * delta
        if estimate is None:
            estimate = 0.5 * (f_plus + f_minus)
        candidate = float(np.clip(beta + step_size * grad, lo, hi))
        g_cand = float(constraint(candidate))
        accepted = g_cand <= 0.0
        cycles.append(
            SpsaCycle(
                delta=delta,
                probe_plus=plus,
                probe_minus=minus,
                f_plus=f_plus,
                f_minus=f_minus,
                gradient=grad,
                step_size=step_size,
                candidate=candidate,
                g_candidate=g_cand,
                accepted=accepted,
            )
        )
        if accepted:
            next_beta = candidate
            stalled = False
            break
    return SpsaStep(
        t=t,
        beta=beta,
        objective_estimate=float(estimate),
        cycles=tuple(cycles),
        backtracks=len(cycles) - 1,
        stalled=stalled,
        next_beta=next_beta,
    )


def _single_run(objective, constraint, config: SpsaConfig, seed: int) -> SpsaRun:
    rng = np.random.default_rng(seed)
    lo, hi = config.bounds
    beta = float(np.clip(config.beta0, lo, hi))
    run = SpsaRun(seed=seed, initial_beta=beta, initial_g=float("nan"))
    try:
        g0 = float(constraint(beta))
    except Exception as err:  # noqa: BLE001
        run.error = f"constraint failed at initial beta={beta!r}: {err}"
        return run
    run.initial_g = g0
    run.n_constraint_evals += 1
    feasible_now = g0 <= 0.0
    _track_violation(run, beta, g0)

    for t in range(1, config.iterations + 1):
        try:
            step = spsa_step(beta, objective, constraint, t, config, rng)
        except Exception as err:  # noqa: BLE001
            run.error = f"step {t} aborted: {err}"
            break
        run.steps.append(step)
        run.n_objective_evals += 2 * len(step.cycles)
        run.n_constraint_evals += len(step.cycles)
        for cycle in step.cycles:
            _track_violation(run, cycle.candidate, cycle.g_candidate)
        # The step's probe mean is the objective measurement at `beta`.
        if feasible_now and (run.best_value is None or step.objective_estimate > run.best_value):
            run.best_beta = beta
            run.best_value = step.objective_estimate
        if not step.stalled:
            beta = step.next_beta
            feasible_now = True
    return run


def _track_violation(run: SpsaRun, beta: float, g_value: float) -> None:
    if g_value < run.min_violation_g:
        run.min_violation_g = g_value
        run.min_violation_beta = beta


def run_spsa(objective, constraint, config: SpsaConfig) -> SpsaTrace:
    """n_runs independent seeded runs; best feasible iterate across runs.

    When no feasible point was ever observed the minimum-violation
    iterate is returned with feasible=False. All runs failing to
    evaluate raises SpsaError.
    """
    trace = SpsaTrace(config=config)
    run_seeds = np.random.SeedSequence(config.seed).spawn(config.n_runs)
    for ss in run_seeds:
        seed = int(ss.generate_state(1)[0])
        trace.runs.append(_single_run(objective, constraint, config, seed))

    usable = [r for r in trace.runs if r.steps or np.isfinite(r.initial_g)]
    if not usable:
        errors = "; ".join(str(r.error) for r in trace.runs)
        raise SpsaError(f"all runs failed: {errors}")

    feasible_runs = [r for r in trace.runs if r.best_beta is not None]
    if feasible_runs:
        best = max(feasible_runs, key=lambda r: r.best_value)
        trace.beta_star = float(best.best_beta)
        trace.best_value = float(best.best_value)
        trace.feasible = True
    else:
        best = min(
            (r for r in trace.runs if r.min_violation_beta is not None),
            key=lambda r: r.min_violation_g,
        )
        trace.beta_star = float(best.min_violation_beta)
        trace.best_value = float("nan")
        trace.feasible = False
    return trace
