"""Spectral locality analysis of hard circular frequency cutoffs.

A binary low-pass mask in the frequency domain corresponds, in the
spatial domain, to convolution with a Jinc-like kernel whose oscillating
side lobes extend across the whole grid. `freq_amplify` implements the
frequency-domain amplification baseline built on such a mask;
`leakage` measures the out-of-radius perturbation it causes, which is
exactly zero for compactly supported spatial windows.

DFT conventions are pinned for reproducibility: unnormalized forward
transform, inverse scaled by 1/(H*W), zero frequency centered at
(H//2, W//2) for masks and kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .modulation import _require_feature_map
from .special import bessel_j1
from .windows import radial_distance

__all__ = [
    "FreqMask",
    "SpatialKernel",
    "make_freq_mask",
    "mask_to_kernel",
    "jinc",
    "freq_amplify",
    "leakage",
]


@dataclass(frozen=True)
class FreqMask:
    """Centered binary frequency mask: 1 within `cutoff` bins of DC."""

    height: int
    width: int
    cutoff: float
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class SpatialKernel:
    """Real spatial kernel of a frequency mask, peak at the grid center."""

    values: np.ndarray
    peak_index: tuple[int, int]
    peak_value: float


def make_freq_mask(height: int, width: int, cutoff: float) -> FreqMask:
    """Binary disk mask of the given cutoff radius, in DFT bin units."""
    if not (height >= 1 and width >= 1):
        raise ValueError("grid dims must be positive")
    if not (np.isfinite(cutoff) and cutoff > 0):
        raise ValueError(f"cutoff must be positive, got {cutoff!r}")
    ii, jj = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    r = radial_distance(ii, jj, (width // 2, height // 2))
    values = (r <= cutoff).astype(float)
    return FreqMask(height=height, width=width, cutoff=float(cutoff), values=values)


def _is_negation_symmetric(mask_values: np.ndarray) -> bool:
    m0 = np.fft.ifftshift(mask_values)
    h, w = m0.shape
    flipped = m0[np.ix_((-np.arange(h)) % h, (-np.arange(w)) % w)]
    return np.array_equal(m0, flipped)


def mask_to_kernel(mask: FreqMask) -> SpatialKernel:
    """Centered inverse DFT of the mask.

    Raises if the mask is not symmetric under frequency negation (the
    kernel would be complex). The tiny imaginary residue of a symmetric
    mask is checked and discarded.
    """
    if not _is_negation_symmetric(mask.values):
        raise ValueError("mask is not symmetric under frequency negation")
    kernel_c = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(mask.values)))
    peak = float(np.max(np.abs(kernel_c.real)))
    residue = float(np.max(np.abs(kernel_c.imag)))
    if residue > 1e-9 * max(peak, 1e-300):
        raise ValueError(f"imaginary residue {residue} exceeds tolerance")
    values = kernel_c.real
    idx = np.unravel_index(np.argmax(np.abs(values)), values.shape)
    return SpatialKernel(values=values, peak_index=(int(idx[0]), int(idx[1])), peak_value=float(values[idx]))


def jinc(cutoff: float, r):
    """Continuous radial kernel J1(2 pi Wc r) / r of a hard cutoff Wc.

    The removable singularity at r = 0 takes its limit value pi * Wc.
    """
    if not (np.isfinite(cutoff) and cutoff > 0):
        raise ValueError(f"cutoff must be positive, got {cutoff!r}")
    scalar = np.ndim(r) == 0
    arr = np.atleast_1d(np.asarray(r, dtype=float))
    if not np.all(np.isfinite(arr)):
        raise ValueError("r must be finite")
    if np.any(arr < 0):
        raise ValueError("r must be >= 0")
    out = np.full_like(arr, math.pi * cutoff)
    pos = arr > 0
    if np.any(pos):
        rp = arr[pos]
        out[pos] = bessel_j1(2.0 * math.pi * cutoff * rp) / rp
    return float(out[0]) if scalar else out


def freq_amplify(x: np.ndarray, cutoff: float, alpha: float) -> np.ndarray:
    """Amplify frequency bins within `cutoff` of DC by `alpha`, per slice.

    DFT -> scale masked bins -> inverse DFT -> real part. This is the
    frequency-domain editing baseline whose spatial footprint is global.
    """
    x = _require_feature_map(x)
    if not np.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha!r}")
    h, w = x.shape[2:]
    mask = make_freq_mask(h, w, cutoff)
    gain = 1.0 + (alpha - 1.0) * np.fft.ifftshift(mask.values)
    spectrum = np.fft.fft2(x, axes=(2, 3))
    return np.fft.ifft2(spectrum * gain, axes=(2, 3)).real


def leakage(
    original: np.ndarray,
    edited: np.ndarray,
    radius: float,
    center: tuple[float, float] | None = None,
) -> float:
    """Largest absolute change outside the disk of `radius` around `center`.

    center defaults to (W/2, H/2). Returns 0.0 when no pixel lies
    outside the disk.
    """
    original = _require_feature_map(original)
    edited = np.asarray(edited)
    if edited.shape != original.shape:
        raise ValueError(f"shape mismatch: {edited.shape} vs {original.shape}")
    h, w = original.shape[2:]
    if center is None:
        center = (w / 2.0, h / 2.0)
    ii, jj = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    outside = radial_distance(ii, jj, center) > radius
    if not np.any(outside):
        return 0.0
    diff = np.abs(edited - original)[:, :, outside]
    return float(np.max(diff))
