"""Scalar special functions: modified Bessel I0, Bessel J1, standard normal.

All functions accept a float or an ndarray and return the same kind.
I0 backs the Kaiser-Bessel window profile, J1 the Jinc analysis of hard
frequency cutoffs, and the normal pdf/cdf the Expected-Improvement
acquisition.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["bessel_i0", "bessel_j1", "std_normal_pdf", "std_normal_cdf"]

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Branch switch points: ascending series below, asymptotic expansion above.
_I0_SERIES_CUTOFF = 15.0
_J1_SERIES_CUTOFF = 12.0


def _as_array(x, name: str) -> tuple[np.ndarray, bool]:
    scalar = np.ndim(x) == 0
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: input must be finite")
    return arr, scalar


def _i0_series(x: np.ndarray) -> np.ndarray:
    # Sum (x/2)^(2k) / (k!)^2 until the terms fall below machine relevance.
    q = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 80):
        term = term * q / (k * k)
        total = total + term
        if np.all(term <= 1e-17 * total):
            break
    return total


def _i0_asymptotic(x: np.ndarray) -> np.ndarray:
    # I0(x) ~ e^x / sqrt(2 pi x) * sum a_k, a_k = prod (2j-1)^2 / (k! (8x)^k).
    # The series eventually diverges; stop before the terms turn around.
    total = np.ones_like(x)
    term = np.ones_like(x)
    for k in range(1, 26):
        factor = (2 * k - 1) ** 2 / (8.0 * k * x)
        if np.any(factor >= 1.0):
            break
        term = term * factor
        total = total + term
        if np.all(term <= 1e-18 * total):
            break
    return np.exp(x) / np.sqrt(2.0 * math.pi * x) * total


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero.

    Ascending power series for x <= 15, asymptotic expansion beyond;
    relative error below 1e-10 on [0, 50].

    Parameters
    ----------
    x : float or ndarray
        Non-negative argument(s).
    """
    arr, scalar = _as_array(x, "bessel_i0")
    if np.any(arr < 0):
        raise ValueError("bessel_i0: x must be >= 0")
    out = np.empty_like(arr)
    small = arr <= _I0_SERIES_CUTOFF
    if np.any(small):
        out[small] = _i0_series(arr[small])
    if np.any(~small):
        out[~small] = _i0_asymptotic(arr[~small])
    return float(out[0]) if scalar else out


def _j1_series(x: np.ndarray) -> np.ndarray:
    # J1(x) = (x/2) * sum (-1)^k (x^2/4)^k / (k! (k+1)!)
    q = 0.25 * x * x
    term = np.full_like(x, 0.5)
    total = term.copy()
    for k in range(1, 60):
        term = term * (-q) / (k * (k + 1))
        total = total + term
        if np.all(np.abs(term) <= 1e-18):
            break
    return x * total


def _j1_asymptotic(x: np.ndarray) -> np.ndarray:
    # Hankel expansion via the complex form
    #   J1(x) = sqrt(2/(pi x)) * Re[ e^{i chi} * sum_k i^k a_k(1) / x^k ],
    # chi = x - 3 pi/4, a_k(1) = prod_{j<=k} (4 - (2j-1)^2) / (k! 8^k).
    # Per-element freeze once a term stops shrinking (divergent tail).
    inv8x = 1.0 / (8.0 * x)
    total = np.ones(x.shape, dtype=complex)
    term = np.ones(x.shape, dtype=complex)
    prev_mag = np.full(x.shape, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 40):
        term = term * (1j * (4.0 - (2 * k - 1) ** 2) * inv8x / k)
        mag = np.abs(term)
        active = active & (mag < prev_mag)
        if not np.any(active):
            break
        total = np.where(active, total + term, total)
        prev_mag = mag
        if np.all(mag[active] <= 1e-18):
            break
    chi = x - 0.75 * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (np.exp(1j * chi) * total).real


def bessel_j1(x):
    """Bessel function of the first kind, order one. Odd: J1(-x) = -J1(x).

    Ascending series for |x| <= 12, Hankel asymptotic form beyond;
    absolute error below 1e-9 on |x| <= 100.
    """
    arr, scalar = _as_array(x, "bessel_j1")
    ax = np.abs(arr)
    out = np.empty_like(arr)
    small = ax <= _J1_SERIES_CUTOFF
    if np.any(small):
        out[small] = _j1_series(ax[small])
    if np.any(~small):
        out[~small] = _j1_asymptotic(ax[~small])
    out = out * np.sign(arr)
    return float(out[0]) if scalar else out


def std_normal_pdf(x):
    """Standard normal density exp(-x^2/2) / sqrt(2 pi)."""
    arr, scalar = _as_array(x, "std_normal_pdf")
    out = np.exp(-0.5 * arr * arr) / _SQRT_2PI
    return float(out[0]) if scalar else out


def std_normal_cdf(x):
    """Standard normal CDF via the complementary error function."""
    arr, scalar = _as_array(x, "std_normal_cdf")
    if scalar:
        return 0.5 * math.erfc(-float(arr[0]) / math.sqrt(2.0))
    erfc = np.vectorize(math.erfc, otypes=[float])
    return 0.5 * erfc(-arr / math.sqrt(2.0))
