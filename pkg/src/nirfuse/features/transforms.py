"""Synthetic geometric transforms used to probe feature stability."""

from __future__ import annotations

import enum
import math

import numpy as np
from scipy import ndimage

from ..imaging import ColorImage, as_plane


class Transform(enum.Enum):
    ROT45 = "ROT45"
    ROT90 = "ROT90"
    ROT180 = "ROT180"
    SCALE_050 = "SCALE_050"
    SCALE_075 = "SCALE_075"


DEFAULT_TRANSFORMS = tuple(Transform)

_SCALES = {Transform.SCALE_050: 0.5, Transform.SCALE_075: 0.75}


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def scaled_shape(shape, factor: float) -> tuple[int, int]:
    return tuple(max(1, _round_half_up(n * factor)) for n in shape)


def rotated_shape(shape, degrees: float) -> tuple[int, int]:
    h, w = shape
    t = math.radians(degrees)
    c, s = abs(math.cos(t)), abs(math.sin(t))
    # Guard against cos/sin rounding pushing an exact integer up by one.
    return (
        int(math.ceil(h * c + w * s - 1e-9)),
        int(math.ceil(w * c + h * s - 1e-9)),
    )


def _rotate(plane: np.ndarray, degrees: float, cval: float) -> np.ndarray:
    """Rotate counter-clockwise about the centre onto an enlarged canvas."""
    h, w = plane.shape
    oh, ow = rotated_shape(plane.shape, degrees)
    t = math.radians(degrees)
    c, s = math.cos(t), math.sin(t)
    yy, xx = np.indices((oh, ow), dtype=np.float64)
    dy = yy - (oh - 1) / 2.0
    dx = xx - (ow - 1) / 2.0
    # Inverse map (rows grow downwards, so visual CCW flips the sin sign).
    src_x = c * dx - s * dy + (w - 1) / 2.0
    src_y = s * dx + c * dy + (h - 1) / 2.0
    return ndimage.map_coordinates(
        plane, [src_y, src_x], order=1, mode="constant", cval=cval
    )


def _scale(plane: np.ndarray, factor: float) -> np.ndarray:
    h, w = plane.shape
    oh, ow = scaled_shape(plane.shape, factor)
    # Pixel-centre aligned bilinear resampling with replicated borders.
    ys = (np.arange(oh) + 0.5) * (h / oh) - 0.5
    xs = (np.arange(ow) + 0.5) * (w / ow) - 0.5
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    return ndimage.map_coordinates(plane, [yy, xx], order=1, mode="nearest")


def transform_plane(plane, t: Transform, cval: float = 0.0) -> np.ndarray:
    plane = as_plane(plane)
    t = Transform(t)
    if t is Transform.ROT90:
        # (x, y) -> (height - 1 - y, x): a clockwise quarter turn.
        return np.ascontiguousarray(np.rot90(plane, -1))
    if t is Transform.ROT180:
        return np.ascontiguousarray(plane[::-1, ::-1])
    if t is Transform.ROT45:
        return np.clip(_rotate(plane, 45.0, cval), 0.0, 1.0)
    return np.clip(_scale(plane, _SCALES[t]), 0.0, 1.0)


def valid_mask(shape, t: Transform) -> np.ndarray:
    """Pixels of the transformed image fully backed by source pixels."""
    t = Transform(t)
    if t is Transform.ROT45:
        cover = _rotate(np.ones(shape), 45.0, 0.0)
        return cover >= 1.0 - 1e-9
    if t is Transform.ROT90:
        out_shape = (shape[1], shape[0])
    elif t is Transform.ROT180:
        out_shape = tuple(shape)
    else:
        out_shape = scaled_shape(shape, _SCALES[t])
    return np.ones(out_shape, dtype=bool)


def apply_transform(img: ColorImage, t: Transform) -> ColorImage:
    return img.map(lambda p: transform_plane(p, t))
