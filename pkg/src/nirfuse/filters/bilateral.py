"""Bilateral filtering: an exact windowed evaluation and a bilateral-grid
approximation.

Both variants use a square spatial window of radius ``ceil(3 * sigma_spatial)``
and replicate (clamp-to-edge) boundaries.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from ..imaging import as_plane
from .params import BFParams


def spatial_radius(sigma_spatial: float) -> int:
    return int(math.ceil(3.0 * sigma_spatial))


def _clamped_axis_weights(n: int, sigma: float, radius: int) -> np.ndarray:
    """Gaussian weights between positions of one clamped axis.

    Entry ``[i, j]`` sums ``exp(-d^2 / 2 sigma^2)`` over all window offsets
    ``d`` in ``[-radius, radius]`` with ``clip(i + d) == j``, i.e. the weight
    that replicated border samples pile onto the real pixel ``j``.
    """
    offsets = np.arange(-radius, radius + 1)
    g = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    targets = np.clip(np.arange(n)[:, None] + offsets[None, :], 0, n - 1)
    rows = np.repeat(np.arange(n), offsets.size)
    w = np.zeros((n, n))
    np.add.at(w, (rows, targets.ravel()), np.tile(g, n))
    return w


def bilateral_direct(src, p: BFParams = BFParams(), chunk: int = 64) -> np.ndarray:
    """Exact bilateral filter.

    The separable spatial kernel is folded onto real pixels with
    :func:`_clamped_axis_weights`, so every output pixel is an exact weighted
    mean over the full replicate-padded window at a cost of ``O((H W)^2)``.
    Meant as a reference for small images.
    """
    src = as_plane(src)
    h, w = src.shape
    radius = spatial_radius(p.sigma_spatial)
    wy = _clamped_axis_weights(h, p.sigma_spatial, radius)
    wx = _clamped_axis_weights(w, p.sigma_spatial, radius)
    inv = 1.0 / (2.0 * p.sigma_range * p.sigma_range)

    out = np.empty_like(src)
    for y in range(h):
        # Row weights do not depend on the column; fold them in once.
        wy_row = wy[y][None, :, None]
        for x0 in range(0, w, chunk):
            xs = slice(x0, min(x0 + chunk, w))
            centre = src[y, xs][:, None, None]
            rng = np.exp(-((src[None] - centre) ** 2) * inv) * wy_row
            den = np.einsum("phw,pw->p", rng, wx[xs])
            num = np.einsum("phw,pw->p", rng * src[None], wx[xs])
            out[y, xs] = num / den
    return np.clip(out, src.min(), src.max())


def grid_range_limits(p: BFParams) -> tuple[float, float]:
    pad = 2.0 * p.sigma_range
    return p.edge_min - pad, p.edge_max + pad


def _splat(coords, values, shape):
    """Trilinear splat of ``values`` at fractional grid ``coords``."""
    base = [np.floor(c).astype(np.intp) for c in coords]
    frac = [c - b for c, b in zip(coords, base)]
    size = int(np.prod(shape))
    grids = [np.zeros(size) for _ in values]
    for corner in range(8):
        weight = np.ones_like(frac[0])
        idx = []
        for axis in range(3):
            bit = (corner >> axis) & 1
            weight = weight * (frac[axis] if bit else 1.0 - frac[axis])
            idx.append(base[axis] + bit)
        flat = np.ravel_multi_index(idx, shape)
        for grid, v in zip(grids, values):
            grid += np.bincount(flat, weights=weight * v, minlength=size)
    return [g.reshape(shape) for g in grids]


def bilateral_fast(src, p: BFParams = BFParams()) -> np.ndarray:
    """Bilateral filter approximated on a down-sampled (y, x, intensity) grid.

    Grid spacing is ``sigma_spatial / 2`` pixels and ``sigma_range / 2``
    intensity units.  The intensity axis covers ``[edge_min, edge_max]``
    padded by ``2 * sigma_range``; values outside are clamped onto it.
    Splatting and slicing are trilinear.  Each of them widens the effective
    kernel by a hat function (variance 1/6 cell^2), so the grid blur is
    narrowed to keep the overall kernel width at the requested sigmas.
    """
    src = as_plane(src)
    h, w = src.shape
    radius = spatial_radius(p.sigma_spatial)
    s_space = p.sigma_spatial / 2.0
    s_range = p.sigma_range / 2.0
    lo, hi = grid_range_limits(p)

    # Replicate padding reproduces the direct filter's border behaviour.
    padded = np.pad(src, radius, mode="edge")
    ph, pw = padded.shape
    yy, xx = np.indices(padded.shape, dtype=np.float64)
    z = (np.clip(padded, lo, hi) - lo) / s_range
    coords = (yy.ravel() / s_space, xx.ravel() / s_space, z.ravel())
    shape = (
        int(math.floor((ph - 1) / s_space)) + 2,
        int(math.floor((pw - 1) / s_space)) + 2,
        int(math.floor((hi - lo) / s_range)) + 2,
    )
    num, den = _splat(coords, (padded.ravel(), np.ones(padded.size)), shape)

    blur = math.sqrt(4.0 - 2.0 / 6.0)  # target sigma = 2 cells on every axis
    num = ndimage.gaussian_filter(num, blur, mode="constant", truncate=3.0)
    den = ndimage.gaussian_filter(den, blur, mode="constant", truncate=3.0)

    yy, xx = np.indices(src.shape, dtype=np.float64)
    sample = np.stack(
        [
            ((yy + radius) / s_space).ravel(),
            ((xx + radius) / s_space).ravel(),
            ((np.clip(src, lo, hi) - lo) / s_range).ravel(),
        ]
    )
    num_s = ndimage.map_coordinates(num, sample, order=1, mode="nearest")
    den_s = ndimage.map_coordinates(den, sample, order=1, mode="nearest")
    out = (num_s / den_s).reshape(h, w)
    return np.clip(out, 0.0, 1.0)
