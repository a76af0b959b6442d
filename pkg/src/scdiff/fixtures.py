"""Deterministic synthetic evaluators and brute-force oracles.

The synthetic evaluators make every optimizer test self-contained; their
formulas are part of the public test contract so alternate
implementations can reuse them verbatim:

- "peak":       s_text = 0.20 + 0.12 * exp(-(alpha-4.2)^2/2) * exp(-(beta-8.5)^2/4)
                s_img  = clip(1 - 0.05*(alpha - 1), 0, 1)
- "identity":   s_text as "peak"; s_img = 1.0 (the generated image never changes)
- "infeasible": s_text as "peak"; s_img = 0.5 (always below the usual 0.7 floor)
- "noisy-peak": "peak" plus centered Gaussian noise (sigma = 0.01) on s_text,
                a deterministic function of (alpha, beta, request seed)

The oracles are deliberately naive (exhaustive grids, O(N^4)
convolution, Monte-Carlo expectation) and share no code with the
implementations they check.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .search import EvalRequest

__all__ = [
    "SyntheticEvaluator",
    "SYNTHETIC_EVALUATORS",
    "get_synthetic_evaluator",
    "peak_scores",
    "random_feature_map",
    "OracleReport",
    "GridSearchOutcome",
    "grid_search_oracle",
    "brute_convolve",
    "mc_expected_improvement",
]


def peak_scores(alpha: float, beta: float) -> tuple[float, float]:
    """The "peak" fixture formulas; shared by all variants below."""
    s_text = 0.20 + 0.12 * math.exp(-((alpha - 4.2) ** 2) / 2.0) * math.exp(
        -((beta - 8.5) ** 2) / 4.0
    )
    s_img = min(max(1.0 - 0.05 * (alpha - 1.0), 0.0), 1.0)
    return s_text, s_img


def _noise_for(alpha: float, beta: float, seed: int, sigma: float) -> float:
    digest = hashlib.sha256(
        np.float64(alpha).tobytes() + np.float64(beta).tobytes() + np.uint64(seed).tobytes()
    ).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    return float(rng.normal(0.0, sigma))


class SyntheticEvaluator:
    """In-process closed-form evaluator; concurrent-safe and deterministic."""

    concurrent = True

    def __init__(self, name: str):
        if name not in SYNTHETIC_EVALUATORS:
            raise ValueError(
                f"unknown synthetic evaluator {name!r}; known: {sorted(SYNTHETIC_EVALUATORS)}"
            )
        self.name = name

    def score(self, request: EvalRequest) -> tuple[float, float]:
        s_text, s_img = peak_scores(request.alpha, request.beta)
        if self.name == "identity":
            s_img = 1.0
        elif self.name == "infeasible":
            s_img = 0.5
        elif self.name == "noisy-peak":
            s_text += _noise_for(request.alpha, request.beta, request.seed, 0.01)
            s_text = min(max(s_text, -1.0), 1.0)
        return s_text, s_img


SYNTHETIC_EVALUATORS = ("peak", "identity", "infeasible", "noisy-peak")


def get_synthetic_evaluator(name: str) -> SyntheticEvaluator:
    return SyntheticEvaluator(name)


def random_feature_map(
    b: int, c: int, h: int, w: int, seed: int, scale: float = 1.0
) -> np.ndarray:
    """Seeded standard-normal feature tensor of shape (b, c, h, w)."""
    rng = np.random.default_rng(seed)
    return scale * rng.standard_normal((b, c, h, w))


@dataclass(frozen=True)
class OracleReport:
    """Record of one oracle comparison, serializable for CI artifacts."""

    oracle: str
    inputs_digest: str
    oracle_value: float
    checked_value: float
    tolerance: float
    passed: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def make_report(
    oracle: str, inputs, oracle_value: float, checked_value: float, tolerance: float
) -> OracleReport:
    digest = hashlib.sha256(repr(inputs).encode()).hexdigest()[:16]
    return OracleReport(
        oracle=oracle,
        inputs_digest=digest,
        oracle_value=float(oracle_value),
        checked_value=float(checked_value),
        tolerance=float(tolerance),
        passed=bool(abs(oracle_value - checked_value) <= tolerance),
    )


@dataclass(frozen=True)
class GridSearchOutcome:
    found: bool
    alpha: float | None
    beta: float | None
    score: float | None


def grid_search_oracle(objective, constraint, alpha_grid, beta_grid) -> GridSearchOutcome:
    """Exhaustive feasible maximizer over the grid cross product.

    Ties break toward the lowest alpha, then the lowest beta (grids are
    scanned in ascending order with strict improvement).
    """
    alpha_grid = sorted(float(a) for a in alpha_grid)
    beta_grid = sorted(float(b) for b in beta_grid)
    if not alpha_grid or not beta_grid:
        raise ValueError("grids must be non-empty")
    best = GridSearchOutcome(found=False, alpha=None, beta=None, score=None)
    for alpha in alpha_grid:
        for beta in beta_grid:
            if constraint(alpha, beta) > 0:
                continue
            score = float(objective(alpha, beta))
            if not best.found or score > best.score:
                best = GridSearchOutcome(found=True, alpha=alpha, beta=beta, score=score)
    return best


def brute_convolve(x: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Direct O(N^4) circular convolution with a center-origin kernel.

    The kernel entry at (H//2, W//2) multiplies the in-place sample, so
    a centered delta kernel is the identity, matching the centered
    spatial kernels produced from frequency masks.
    """
    x = np.asarray(x, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    if x.shape != kernel.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {kernel.shape}")
    h, w = x.shape
    cy, cx = h // 2, w // 2
    out = np.zeros_like(x)
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for u in range(h):
                for v in range(w):
                    acc += kernel[u, v] * x[(i - (u - cy)) % h, (j - (v - cx)) % w]
            out[i, j] = acc
    return out


def mc_expected_improvement(
    mu: float, sigma: float, f_best: float, n_samples: int, seed: int
) -> float:
    """Seeded Monte-Carlo mean of max(G - f_best, 0), G ~ N(mu, sigma^2)."""
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if sigma == 0.0:
        return max(mu - f_best, 0.0)
    rng = np.random.default_rng(seed)
    draws = rng.normal(mu, sigma, size=n_samples)
    return float(np.mean(np.maximum(draws - f_best, 0.0)))
