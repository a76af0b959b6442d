"""Compactly supported 2D spatial windows on pixel grids.

Three profiles over a disk of radius R around an adjustable center:

- ``kaiser_bessel``: I0(beta * sqrt(1 - (r/R)^2)) / I0(beta), the
  energy-concentrating taper; beta = 0 degenerates to the binary disk.
- ``gaussian``: exp(-r^2 / (2 (eta R)^2)) truncated at R; eta is the
  standard deviation as a fraction of R.
- ``circular``: the binary disk indicator.

Every profile is exactly 0.0 outside r <= R (bit-exact compact support).
Distances are measured at integer pixel indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .special import bessel_i0

__all__ = ["WindowSpec", "Window", "radial_distance", "build_window", "replicate"]

KINDS = ("kaiser_bessel", "gaussian", "circular")


@dataclass(frozen=True)
class WindowSpec:
    """Parameters of a 2D spatial window.

    center is (cx, cy) in pixel coordinates (cx along columns, cy along
    rows) and defaults to (width/2, height/2). It may lie outside the
    grid for off-center enhancement.
    """

    kind: str
    height: int
    width: int
    radius: float
    beta: float = 0.0
    eta: float = 0.5
    center: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind: must be one of {KINDS}, got {self.kind!r}")
        if not (isinstance(self.height, (int, np.integer)) and self.height >= 1):
            raise ValueError(f"height: must be a positive integer, got {self.height!r}")
        if not (isinstance(self.width, (int, np.integer)) and self.width >= 1):
            raise ValueError(f"width: must be a positive integer, got {self.width!r}")
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius: must be positive, got {self.radius!r}")
        if self.kind == "kaiser_bessel" and not (np.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta: must be >= 0, got {self.beta!r}")
        if self.kind == "gaussian" and not (np.isfinite(self.eta) and 0 < self.eta <= 2):
            raise ValueError(f"eta: must be in (0, 2], got {self.eta!r}")
        if self.center is not None:
            cx, cy = self.center
            if not (np.isfinite(cx) and np.isfinite(cy)):
                raise ValueError(f"center: must be finite, got {self.center!r}")
            object.__setattr__(self, "center", (float(cx), float(cy)))

    @property
    def resolved_center(self) -> tuple[float, float]:
        if self.center is None:
            return (self.width / 2.0, self.height / 2.0)
        return self.center


@dataclass(frozen=True)
class Window:
    """An H x W matrix of weights in [0, 1] plus the spec that built it."""

    values: np.ndarray
    spec: WindowSpec

    def __post_init__(self):
        self.values.setflags(write=False)


def radial_distance(i, j, center: tuple[float, float]):
    """Distance of pixel (row i, col j) from center (cx, cy).

    Accepts scalars or arrays; returns sqrt((i - cy)^2 + (j - cx)^2).
    """
    cx, cy = center
    return np.hypot(np.asarray(i, dtype=float) - cy, np.asarray(j, dtype=float) - cx)


def _distance_grid(spec: WindowSpec) -> np.ndarray:
    ii, jj = np.meshgrid(
        np.arange(spec.height, dtype=float),
        np.arange(spec.width, dtype=float),
        indexing="ij",
    )
    return radial_distance(ii, jj, spec.resolved_center)


def build_window(spec: WindowSpec) -> Window:
    """Evaluate the window profile on the spec's grid.

    Pixels with r > R are exactly zero for all three kinds; the r = R
    boundary is included in the support.
    """
    r = _distance_grid(spec)
    inside = r <= spec.radius
    values = np.zeros((spec.height, spec.width), dtype=float)
    if spec.kind == "circular":
        values[inside] = 1.0
    elif spec.kind == "kaiser_bessel":
        arg = spec.beta * np.sqrt(np.clip(1.0 - (r[inside] / spec.radius) ** 2, 0.0, None))
        values[inside] = bessel_i0(arg) / bessel_i0(spec.beta)
    else:
        sigma = spec.eta * spec.radius
        values[inside] = np.exp(-(r[inside] ** 2) / (2.0 * sigma * sigma))
    return Window(values=values, spec=spec)


def replicate(window: Window, count: int) -> np.ndarray:
    """Stack `count` identical copies of the window, shape (count, H, W)."""
    if not (isinstance(count, (int, np.integer)) and count >= 1):
        raise ValueError(f"count: must be a positive integer, got {count!r}")
    return np.repeat(window.values[None, :, :], count, axis=0)
