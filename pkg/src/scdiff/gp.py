"""Gaussian-process regression on a scalar input with a Matern-5/2 kernel.

Hyperparameters (length scale, signal variance, noise variance) are
inferred by multi-start maximization of the log marginal likelihood in
log-parameter space. Inputs are standardized to [0, 1] over the search
interval during fitting; observations are centered by their mean, which
is added back at prediction, so the zero-mean prior serves non-centered
scores (predictions revert to the observation mean far from data).

Factorization guard: the Cholesky is attempted with no jitter first,
then with 1e-9 * signal_var, then 1e-6 * signal_var on the Gram
diagonal. Noiseless single-point models therefore interpolate exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import minimize

__all__ = [
    "GpHyperparams",
    "GpModel",
    "HyperparamBounds",
    "FitError",
    "matern52",
    "make_model",
    "fit",
    "posterior",
    "posterior_many",
]

_SQRT5 = math.sqrt(5.0)
_JITTER_SCALES = (0.0, 1e-9, 1e-6)


class FitError(RuntimeError):
    """Raised when hyperparameter inference cannot proceed."""


@dataclass(frozen=True)
class GpHyperparams:
    """Kernel hyperparameters, in the units of the raw inputs/outputs."""

    length_scale: float
    signal_var: float
    noise_var: float

    def __post_init__(self):
        if not (np.isfinite(self.length_scale) and self.length_scale > 0):
            raise ValueError(f"length_scale: must be positive, got {self.length_scale!r}")
        if not (np.isfinite(self.signal_var) and self.signal_var > 0):
            raise ValueError(f"signal_var: must be positive, got {self.signal_var!r}")
        if not (np.isfinite(self.noise_var) and self.noise_var >= 0):
            raise ValueError(f"noise_var: must be >= 0, got {self.noise_var!r}")


@dataclass(frozen=True)
class HyperparamBounds:
    """Box bounds for fitting, with the length scale expressed as a
    fraction of the input-range width."""

    length_scale: tuple[float, float] = (0.05, 10.0)
    signal_var: tuple[float, float] = (1e-4, 10.0)
    noise_var: tuple[float, float] = (1e-8, 1.0)


def matern52(x: float, x2: float, hp: GpHyperparams) -> float:
    """Matern-5/2 covariance between two scalar inputs."""
    r = abs(x - x2)
    s = _SQRT5 * r / hp.length_scale
    return hp.signal_var * (1.0 + s + s * s / 3.0) * math.exp(-s)


def _kernel_matrix(xa: np.ndarray, xb: np.ndarray, hp: GpHyperparams) -> np.ndarray:
    s = _SQRT5 * np.abs(xa[:, None] - xb[None, :]) / hp.length_scale
    return hp.signal_var * (1.0 + s + s * s / 3.0) * np.exp(-s)


@dataclass(frozen=True)
class GpModel:
    hyperparams: GpHyperparams
    x: np.ndarray
    y: np.ndarray
    y_mean: float
    chol: tuple = field(repr=False)
    alpha_vec: np.ndarray = field(repr=False)
    log_likelihood: float = float("nan")


def _factorize(k: np.ndarray, signal_var: float):
    last_err = None
    for scale in _JITTER_SCALES:
        try:
            return cho_factor(k + scale * signal_var * np.eye(len(k)), lower=True)
        except np.linalg.LinAlgError as err:
            last_err = err
    raise FitError(f"Gram matrix not positive definite even with jitter: {last_err}")


def make_model(observations, hp: GpHyperparams) -> GpModel:
    """Build a model with explicit hyperparameters (no fitting)."""
    x, y = _split_observations(observations, minimum=1)
    y_mean = float(np.mean(y))
    yc = y - y_mean
    k = _kernel_matrix(x, x, hp) + hp.noise_var * np.eye(len(x))
    chol = _factorize(k, hp.signal_var)
    alpha_vec = cho_solve(chol, yc)
    ll = _log_likelihood_from_factor(chol, alpha_vec, yc)
    return GpModel(
        hyperparams=hp, x=x, y=y, y_mean=y_mean, chol=chol, alpha_vec=alpha_vec, log_likelihood=ll
    )


def _split_observations(observations, minimum: int):
    pairs = list(observations)
    if len(pairs) < minimum:
        raise FitError(f"need at least {minimum} observation(s), got {len(pairs)}")
    x = np.asarray([p[0] for p in pairs], dtype=float)
    y = np.asarray([p[1] for p in pairs], dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise FitError("observations must be finite")
    return x, y


def _log_likelihood_from_factor(chol, alpha_vec, yc) -> float:
    n = len(yc)
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol[0]))))
    return -0.5 * float(yc @ alpha_vec) - 0.5 * logdet - 0.5 * n * math.log(2.0 * math.pi)


def _lml_and_grad(log_theta, rdist, yc, fixed_noise_var):
    """Log marginal likelihood and its gradient in log-parameter space.

    Uses d lml / d theta = 0.5 tr((alpha alpha^T - K^-1) dK/d theta).
    """
    n = len(yc)
    length_scale = math.exp(log_theta[0])
    signal_var = math.exp(log_theta[1])
    noise_var = fixed_noise_var if fixed_noise_var is not None else math.exp(log_theta[2])
    s = _SQRT5 * rdist / length_scale
    damp = np.exp(-s)
    corr = (1.0 + s + s * s / 3.0) * damp
    eye = np.eye(n)
    chol = None
    jitter = 0.0
    for scale in _JITTER_SCALES:
        try:
            chol = cho_factor(signal_var * corr + (noise_var + scale * signal_var) * eye, lower=True)
            jitter = scale
            break
        except np.linalg.LinAlgError:
            continue
    if chol is None:
        return -1e25, np.zeros(len(log_theta))
    alpha_vec = cho_solve(chol, yc)
    lml = _log_likelihood_from_factor(chol, alpha_vec, yc)
    aat_minus_kinv = np.outer(alpha_vec, alpha_vec) - cho_solve(chol, eye)
    dk_length = signal_var * (s * s / 3.0) * (1.0 + s) * damp
    dk_signal = signal_var * corr + jitter * signal_var * eye
    grad = [0.5 * np.sum(aat_minus_kinv * dk_length), 0.5 * np.sum(aat_minus_kinv * dk_signal)]
    if fixed_noise_var is None:
        grad.append(0.5 * noise_var * np.trace(aat_minus_kinv))
    return lml, np.asarray(grad)


def _lml(log_theta, rdist, yc, fixed_noise_var):
    return _lml_and_grad(log_theta, rdist, yc, fixed_noise_var)[0]


def fit(
    observations,
    bounds: HyperparamBounds = HyperparamBounds(),
    input_range: tuple[float, float] | None = None,
    fixed_noise_var: float | None = None,
    n_starts: int = 8,
    seed: int = 0,
) -> GpModel:
    """Fit hyperparameters by multi-start ascent of the marginal likelihood.

    Parameters
    ----------
    observations : iterable of (x, y)
        At least two points; inputs must not all coincide.
    bounds : HyperparamBounds
        Length-scale bounds are relative to the input-range width.
    input_range : (lo, hi), optional
        Standardization interval; defaults to the data range.
    fixed_noise_var : float, optional
        Pin the noise variance (raw y units) instead of fitting it.
    """
    x, y = _split_observations(observations, minimum=2)
    if input_range is None:
        input_range = (float(np.min(x)), float(np.max(x)))
    lo, hi = input_range
    width = hi - lo
    if width <= 0:
        raise FitError("degenerate inputs: all observation inputs are identical")
    x01 = (x - lo) / width
    y_mean = float(np.mean(y))
    yc = y - y_mean
    rdist = np.abs(x01[:, None] - x01[None, :])

    log_bounds = [
        (math.log(bounds.length_scale[0]), math.log(bounds.length_scale[1])),
        (math.log(bounds.signal_var[0]), math.log(bounds.signal_var[1])),
    ]
    if fixed_noise_var is None:
        log_bounds.append((math.log(bounds.noise_var[0]), math.log(bounds.noise_var[1])))

    rng = np.random.default_rng(seed)
    center = np.array([0.5 * (b[0] + b[1]) for b in log_bounds])
    starts = [center]
    for _ in range(max(0, n_starts - 1)):
        starts.append(np.array([rng.uniform(b[0], b[1]) for b in log_bounds]))

    def objective(theta):
        lml, grad = _lml_and_grad(theta, rdist, yc, fixed_noise_var)
        return -lml, -grad

    best_theta, best_ll = None, -np.inf
    for start in starts:
        start_ll = _lml(start, rdist, yc, fixed_noise_var)
        if start_ll > best_ll:
            best_theta, best_ll = start, start_ll
        result = minimize(
            objective, start, method="L-BFGS-B", jac=True, bounds=log_bounds,
            options={"maxiter": 60},
        )
        cand_ll = _lml(result.x, rdist, yc, fixed_noise_var)
        if cand_ll > best_ll:
            best_theta, best_ll = np.asarray(result.x), cand_ll

    if best_theta is None or not np.isfinite(best_ll):
        raise FitError("marginal-likelihood optimization failed at every start")

    noise_var = (
        fixed_noise_var if fixed_noise_var is not None else math.exp(best_theta[2])
    )
    hp = GpHyperparams(
        length_scale=math.exp(best_theta[0]) * width,
        signal_var=math.exp(best_theta[1]),
        noise_var=noise_var,
    )
    return make_model(list(zip(x, y)), hp)


def posterior_many(model: GpModel, xs) -> tuple[np.ndarray, np.ndarray]:
    """Predictive mean and stddev of the latent function at many points."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    kstar = _kernel_matrix(model.x, xs, model.hyperparams)
    mu = model.y_mean + kstar.T @ model.alpha_vec
    v = cho_solve(model.chol, kstar)
    var = model.hyperparams.signal_var - np.einsum("ij,ij->j", kstar, v)
    sigma = np.sqrt(np.clip(var, 0.0, None))
    return mu, sigma


def posterior(model: GpModel, x: float) -> tuple[float, float]:
    """Predictive mean and stddev at a single point."""
    mu, sigma = posterior_many(model, [x])
    return float(mu[0]), float(sigma[0])
