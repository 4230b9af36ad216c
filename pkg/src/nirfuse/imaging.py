"""Planar images, YCbCr conversion, raster IO and full-reference metrics.

A *plane* is a 2-D ``float64`` numpy array (rows = height) holding
intensities in [0, 1].  Colour images are kept as three planes so that the
luminance plane can be swapped out without touching chrominance.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import cv2
import numpy as np

from .errors import FormatError, ShapeError

SUPPORTED_SUFFIXES = (".png", ".jpg", ".jpeg", ".tif", ".tiff")

# Full-range ITU-R BT.601.
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])
RGB_TO_YCBCR = np.array(
    [
        LUMA_WEIGHTS,
        [-0.299 / 1.772, -0.587 / 1.772, 0.5],
        [0.5, -0.587 / 1.402, -0.114 / 1.402],
    ]
)
YCBCR_TO_RGB = np.linalg.inv(RGB_TO_YCBCR)


def as_plane(data) -> np.ndarray:
    """Return ``data`` as a contiguous float64 plane, validating its values."""
    plane = np.ascontiguousarray(data, dtype=np.float64)
    if plane.ndim != 2:
        raise ShapeError(f"a plane must be 2-D, got shape {plane.shape}")
    if not np.all(np.isfinite(plane)):
        raise ValueError("plane contains non-finite values")
    return plane


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ColorImage:
    r: np.ndarray
    g: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        planes = [as_plane(p) for p in (self.r, self.g, self.b)]
        if len({p.shape for p in planes}) != 1:
            raise ShapeError("r, g and b planes must share dimensions")
        for name, p in zip("rgb", planes):
            object.__setattr__(self, name, _frozen(p))

    @property
    def shape(self) -> tuple[int, int]:
        return self.r.shape

    @property
    def height(self) -> int:
        return self.r.shape[0]

    @property
    def width(self) -> int:
        return self.r.shape[1]

    @classmethod
    def from_array(cls, rgb) -> "ColorImage":
        rgb = np.asarray(rgb, dtype=np.float64)
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise ShapeError(f"expected an H x W x 3 array, got {rgb.shape}")
        return cls(rgb[..., 0], rgb[..., 1], rgb[..., 2])

    def to_array(self) -> np.ndarray:
        return np.stack([self.r, self.g, self.b], axis=-1)

    def map(self, fn) -> "ColorImage":
        """Apply a plane -> plane function to each channel."""
        return ColorImage(fn(self.r), fn(self.g), fn(self.b))


@dataclass(frozen=True, eq=False)
class LumaChroma:
    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray

    def __post_init__(self):
        planes = [as_plane(p) for p in (self.y, self.cb, self.cr)]
        if len({p.shape for p in planes}) != 1:
            raise ShapeError("y, cb and cr planes must share dimensions")
        for name, p in zip(("y", "cb", "cr"), planes):
            object.__setattr__(self, name, _frozen(p))

    @property
    def shape(self) -> tuple[int, int]:
        return self.y.shape


def rgb_to_ycbcr(img: ColorImage) -> LumaChroma:
    ycc = img.to_array() @ RGB_TO_YCBCR.T
    return LumaChroma(
        np.clip(ycc[..., 0], 0.0, 1.0),
        np.clip(ycc[..., 1], -0.5, 0.5),
        np.clip(ycc[..., 2], -0.5, 0.5),
    )


def ycbcr_to_rgb(lc: LumaChroma) -> ColorImage:
    ycc = np.stack([lc.y, lc.cb, lc.cr], axis=-1)
    return ColorImage.from_array(np.clip(ycc @ YCBCR_TO_RGB.T, 0.0, 1.0))


def luminance(img: ColorImage) -> np.ndarray:
    return rgb_to_ycbcr(img).y


def _check_same_shape(a: ColorImage, b: ColorImage) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"dimension mismatch: {a.shape} vs {b.shape}")


def mse(a: ColorImage, b: ColorImage) -> float:
    """Mean squared error over all pixels and all three channels."""
    _check_same_shape(a, b)
    diff = a.to_array() - b.to_array()
    return float(np.mean(diff * diff))


def psnr(a: ColorImage, b: ColorImage) -> float:
    """Peak signal-to-noise ratio in dB for peak 1.0; ``math.inf`` if equal."""
    return psnr_from_mse(mse(a, b))


def psnr_from_mse(err: float) -> float:
    if err == 0:
        return math.inf
    return 10.0 * math.log10(1.0 / err)


# -- raster IO -------------------------------------------------------------

def _read_raster(path) -> np.ndarray:
    path = os.fspath(path)
    if not os.path.isfile(path) or not os.access(path, os.R_OK):
        raise OSError(f"cannot read image file: {path}")
    if not path.lower().endswith(SUPPORTED_SUFFIXES):
        raise FormatError(f"unsupported raster format: {path}")
    raw = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise FormatError(f"could not decode image: {path}")
    if raw.dtype == np.uint8:
        scale = 255.0
    elif raw.dtype == np.uint16:
        scale = 65535.0
    else:
        raise FormatError(f"unsupported sample type {raw.dtype}: {path}")
    data = raw.astype(np.float64) / scale
    if data.ndim == 3:
        if data.shape[2] == 1:
            data = data[..., 0]
        elif data.shape[2] in (3, 4):
            # OpenCV decodes to BGR(A); alpha is dropped.
            data = data[..., 2::-1]
        elif data.shape[2] == 2:
            data = data[..., 0]
        else:
            raise FormatError(f"unsupported channel count {data.shape[2]}: {path}")
    return np.ascontiguousarray(data)


def load_gray(path) -> np.ndarray:
    """Load a raster as a single plane; colour inputs are reduced to luma."""
    data = _read_raster(path)
    if data.ndim == 3:
        data = np.clip(data @ LUMA_WEIGHTS, 0.0, 1.0)
    return as_plane(data)


def load_color(path) -> ColorImage:
    data = _read_raster(path)
    if data.ndim != 3:
        raise FormatError(f"expected a colour image, got a grayscale one: {path}")
    return ColorImage.from_array(data)


def to_uint8(data) -> np.ndarray:
    """Quantise [0, 1] values to 8 bits, rounding half up."""
    return np.floor(np.clip(data, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def save_png(image, path) -> None:
    """Write a plane or ColorImage as an 8-bit PNG."""
    path = os.fspath(path)
    if isinstance(image, ColorImage):
        out = to_uint8(image.to_array())[..., ::-1]
    else:
        out = to_uint8(as_plane(image))
    if not cv2.imwrite(path, np.ascontiguousarray(out)):
        raise OSError(f"could not write {path}")
