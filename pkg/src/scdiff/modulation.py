"""Window-weighted feature-map blending and sequence<->grid reshapes.

The blend amplifies a (B, C, H, W) feature tensor inside a window's
support and leaves it untouched (bit-identical) outside:

    out = x * (1 - w) + alpha * x * w

Token reshapes convert transformer sequences (L, D) to spatial maps
(1, D, H, W) and back, row-major (sequence position k = i*W + j).

A flat binary interchange format is provided for fixture exchange:
16-byte header of four little-endian uint32 dims (B, C, H, W) followed
by B*C*H*W little-endian float32 values in C order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .windows import Window

__all__ = [
    "modulate",
    "tokens_to_grid",
    "grid_to_tokens",
    "write_feature_map",
    "read_feature_map",
]

_HEADER = struct.Struct("<4I")


def _require_feature_map(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 4:
        raise ValueError(f"feature map must have shape (B, C, H, W), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("feature map entries must be finite")
    return x


def modulate(x: np.ndarray, window: Window, alpha: float) -> np.ndarray:
    """Blend x with an alpha-amplified windowed copy of itself.

    alpha = 1 returns an exact copy; entries where the window is zero are
    bit-identical to the input for every alpha.
    """
    x = _require_feature_map(x)
    if not np.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha!r}")
    w = window.values
    if w.shape != x.shape[2:]:
        raise ValueError(
            f"window grid {w.shape} does not match feature map spatial dims {x.shape[2:]}"
        )
    if alpha == 1.0:
        return x.copy()
    # x*(1-w) + alpha*x*w rewritten as x + (alpha-1)*x*w; the explicit
    # where() keeps out-of-support entries bit-identical even for -0.0.
    blended = x + (alpha - 1.0) * (x * w)
    return np.where(w > 0.0, blended, x)


def tokens_to_grid(tokens: np.ndarray, height: int, width: int) -> np.ndarray:
    """Reshape an (L, D) token sequence to a (1, D, H, W) feature map."""
    tokens = np.asarray(tokens)
    if tokens.ndim != 2:
        raise ValueError(f"tokens must have shape (L, D), got {tokens.shape}")
    length, depth = tokens.shape
    if length != height * width:
        raise ValueError(f"token count {length} != height*width = {height * width}")
    grid = tokens.reshape(height, width, depth)
    return np.transpose(grid, (2, 0, 1))[None, :, :, :]


def grid_to_tokens(x: np.ndarray) -> np.ndarray:
    """Inverse of tokens_to_grid; requires batch size 1."""
    x = np.asarray(x)
    if x.ndim != 4:
        raise ValueError(f"feature map must have shape (1, C, H, W), got {x.shape}")
    if x.shape[0] != 1:
        raise ValueError(f"batch size must be 1, got {x.shape[0]}")
    _, depth, height, width = x.shape
    return np.transpose(x[0], (1, 2, 0)).reshape(height * width, depth)


def write_feature_map(path: str | Path, x: np.ndarray) -> None:
    """Write a feature map in the flat binary interchange format."""
    x = _require_feature_map(x)
    b, c, h, w = x.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(b, c, h, w))
        fh.write(np.ascontiguousarray(x, dtype="<f4").tobytes())


def read_feature_map(path: str | Path) -> np.ndarray:
    """Read a feature map written by write_feature_map; returns float32."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    b, c, h, w = _HEADER.unpack_from(raw)
    expected = _HEADER.size + 4 * b * c * h * w
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size)
    return data.reshape(b, c, h, w).copy()
