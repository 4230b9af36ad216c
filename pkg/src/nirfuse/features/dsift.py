"""Dense SIFT descriptors on a regular grid.

Each descriptor covers a square window of ``4 * bin_size`` pixels split into
4 x 4 spatial bins, with 8 orientation bins per spatial bin.  Gradient
magnitudes are distributed bilinearly over both spatial bins and orientation
bins.  The window is flat (no Gaussian fall-off).  Component ``(by, bx, k)``
of a descriptor is stored at index ``(by * 4 + bx) * 8 + k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ImageTooSmallError
from ..imaging import as_plane

NUM_SPATIAL = 4
NUM_ORIENT = 8
DESCRIPTOR_SIZE = NUM_SPATIAL * NUM_SPATIAL * NUM_ORIENT
CLAMP = 0.2
# Windows whose raw histogram norm is below this count as featureless.
ZERO_NORM = 1e-10


@dataclass(frozen=True, eq=False)
class DescriptorSet:
    descriptors: np.ndarray  # (N, 128)
    grid: np.ndarray  # (N, 2) window centres as (x, y)
    bin_size: int
    step: int

    def __len__(self) -> int:
        return self.descriptors.shape[0]

    @property
    def nonzero(self) -> np.ndarray:
        return np.any(self.descriptors != 0, axis=1)


def grid_positions(n: int, bin_size: int, step: int) -> np.ndarray:
    """Window start offsets along one axis of length ``n``."""
    span = NUM_SPATIAL * bin_size
    return np.arange(0, n - span + 1, step)


def grid_count(shape, bin_size: int = 8, step: int = 4) -> int:
    span = NUM_SPATIAL * bin_size
    h, w = shape
    return ((h - span) // step + 1) * ((w - span) // step + 1)


def gradients(plane: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Central differences with replicated borders."""
    padded = np.pad(plane, 1, mode="edge")
    gx = 0.5 * (padded[1:-1, 2:] - padded[1:-1, :-2])
    gy = 0.5 * (padded[2:, 1:-1] - padded[:-2, 1:-1])
    return gx, gy


def orientation_maps(plane: np.ndarray) -> np.ndarray:
    """Gradient magnitude split linearly over 8 orientation bins, (8, H, W)."""
    gx, gy = gradients(plane)
    mag = np.hypot(gx, gy)
    theta = np.mod(np.arctan2(gy, gx), 2.0 * np.pi)
    pos = theta / (2.0 * np.pi / NUM_ORIENT)
    lower = np.floor(pos)
    frac = pos - lower
    lower = lower.astype(np.intp) % NUM_ORIENT
    upper = (lower + 1) % NUM_ORIENT
    w_lower = mag * (1.0 - frac)
    w_upper = mag * frac
    maps = np.empty((NUM_ORIENT,) + plane.shape)
    for k in range(NUM_ORIENT):
        maps[k] = np.where(lower == k, w_lower, 0.0) + np.where(upper == k, w_upper, 0.0)
    return maps


def spatial_weights(bin_size: int) -> np.ndarray:
    """(4 * bin_size, 4) bilinear weights of each window pixel per bin."""
    span = NUM_SPATIAL * bin_size
    u = (np.arange(span) + 0.5) / bin_size - 0.5
    centres = np.arange(NUM_SPATIAL)
    return np.maximum(0.0, 1.0 - np.abs(u[:, None] - centres[None, :]))


def normalize(desc: np.ndarray) -> np.ndarray:
    """L2-normalise, clamp at 0.2 and renormalise; featureless rows -> 0."""
    norm = np.linalg.norm(desc, axis=1, keepdims=True)
    live = norm[:, 0] > ZERO_NORM
    out = np.zeros_like(desc)
    d = desc[live] / norm[live]
    d = np.minimum(d, CLAMP)
    out[live] = d / np.linalg.norm(d, axis=1, keepdims=True)
    return out


def _window_validity(mask: np.ndarray, ys, xs, span: int) -> np.ndarray:
    """True where the window plus its 1-pixel gradient margin is all valid."""
    bad = np.pad((~mask).astype(np.int64), 1, mode="constant", constant_values=0)
    integral = np.zeros((bad.shape[0] + 1, bad.shape[1] + 1), dtype=np.int64)
    integral[1:, 1:] = bad.cumsum(0).cumsum(1)
    # In padded coordinates the margin-extended window starts at (y, x).
    y0 = ys[:, None]
    x0 = xs[None, :]
    y1 = y0 + span + 2
    x1 = x0 + span + 2
    count = integral[y1, x1] - integral[y0, x1] - integral[y1, x0] + integral[y0, x0]
    return count == 0


def dense_sift(luma, bin_size: int = 8, step: int = 4, mask=None) -> DescriptorSet:
    """Compute dense SIFT descriptors of a plane.

    ``mask`` marks pixels that carry image content; windows touching an
    invalid pixel (including the one-pixel gradient margin) are dropped.
    """
    plane = as_plane(luma)
    span = NUM_SPATIAL * bin_size
    h, w = plane.shape
    if h < span or w < span:
        raise ImageTooSmallError(
            f"image {w}x{h} is smaller than the {span}x{span} descriptor window"
        )
    ys = grid_positions(h, bin_size, step)
    xs = grid_positions(w, bin_size, step)
    weights = spatial_weights(bin_size)

    maps = orientation_maps(plane)
    nx, ny = len(xs), len(ys)
    pooled = np.empty((ny, nx, NUM_SPATIAL, NUM_SPATIAL, NUM_ORIENT))
    for k in range(NUM_ORIENT):
        # Pool along x, then along y; windows start every `step` pixels.
        win_x = sliding_window_view(maps[k], span, axis=1)[:, ::step][:, :nx]
        along_x = win_x @ weights  # (H, nx, 4[bx])
        win_y = sliding_window_view(along_x, span, axis=0)[::step][:ny]
        pooled[..., k] = np.swapaxes(win_y @ weights, 2, 3)
    desc = normalize(pooled.reshape(ny * nx, DESCRIPTOR_SIZE))

    centre = (span - 1) / 2.0
    gy, gx = np.meshgrid(ys + centre, xs + centre, indexing="ij")
    grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        keep = _window_validity(mask, ys, xs, span).ravel()
        desc, grid = desc[keep], grid[keep]
    return DescriptorSet(desc, grid, bin_size, step)
