"""RGB/NIR fusion by base/detail layer recombination.

All methods work on the luminance plane only: the RGB image is converted to
YCbCr, a new luminance is built from an RGB base layer plus NIR detail, and
the original chrominance is reattached unchanged.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError
from .filters import BFParams, Filter, WLSParams, decompose, smooth
from .imaging import ColorImage, LumaChroma, as_plane, rgb_to_ycbcr, ycbcr_to_rgb


class Method(enum.Enum):
    BFWLS_AVG = "BFWLS_AVG"
    BFWLS_MAX = "BFWLS_MAX"
    SWAP_BF = "SWAP_BF"
    SWAP_WLS = "SWAP_WLS"


class MaxRule(enum.Enum):
    MAGNITUDE = "magnitude"
    SIGNED = "signed"


@dataclass(frozen=True)
class FusionMethod:
    tag: Method
    bf: BFParams = field(default_factory=BFParams)
    wls: WLSParams = field(default_factory=WLSParams)
    max_rule: MaxRule = MaxRule.MAGNITUDE
    # Production path uses the grid bilateral; tests may swap in the direct one.
    bf_filter: Filter = Filter.BF_FAST

    def __post_init__(self):
        object.__setattr__(self, "tag", Method(self.tag))
        object.__setattr__(self, "max_rule", MaxRule(self.max_rule))
        if self.bf_filter not in (Filter.BF_FAST, Filter.BF_DIRECT):
            raise ValueError("bf_filter must be a bilateral variant")

    @property
    def name(self) -> str:
        return self.tag.value


def _check_pair(a, b) -> None:
    if np.shape(a) != np.shape(b):
        raise ShapeError(f"dimension mismatch: {np.shape(a)} vs {np.shape(b)}")


def fuse_details_avg(d_wls, d_bf) -> np.ndarray:
    _check_pair(d_wls, d_bf)
    return 0.5 * (np.asarray(d_wls, dtype=np.float64) + np.asarray(d_bf, dtype=np.float64))


def fuse_details_max(d_wls, d_bf, rule: MaxRule = MaxRule.MAGNITUDE) -> np.ndarray:
    """Per-pixel maximum of two detail layers.

    The default picks whichever operand has the larger magnitude, keeping its
    sign (ties go to ``d_wls``).  ``MaxRule.SIGNED`` is the plain maximum.
    """
    _check_pair(d_wls, d_bf)
    a = np.asarray(d_wls, dtype=np.float64)
    b = np.asarray(d_bf, dtype=np.float64)
    if MaxRule(rule) is MaxRule.SIGNED:
        return np.maximum(a, b)
    return np.where(np.abs(b) > np.abs(a), b, a)


@dataclass(frozen=True, eq=False)
class FusionResult:
    ycbcr: LumaChroma
    clamped: int
    """Number of luminance samples clamped into [0, 1]."""

    @property
    def image(self) -> ColorImage:
        return ycbcr_to_rgb(self.ycbcr)


def _assemble(lc: LumaChroma, base, detail) -> FusionResult:
    y = base + detail
    clamped = int(np.count_nonzero((y < 0.0) | (y > 1.0)))
    return FusionResult(LumaChroma(np.clip(y, 0.0, 1.0), lc.cb, lc.cr), clamped)


def _prepare(rgb: ColorImage, nir) -> tuple[LumaChroma, np.ndarray]:
    nir = as_plane(nir)
    if nir.shape != rgb.shape:
        raise ShapeError(f"dimension mismatch: rgb {rgb.shape} vs nir {nir.shape}")
    return rgb_to_ycbcr(rgb), nir


def bfwls_fuse_ycbcr(rgb: ColorImage, nir, method: FusionMethod) -> FusionResult:
    if method.tag not in (Method.BFWLS_AVG, Method.BFWLS_MAX):
        raise ValueError(f"{method.name} is not a BFWLS method")
    lc, nir = _prepare(rgb, nir)
    d_wls = decompose(nir, Filter.WLS, method.wls).detail
    d_bf = decompose(nir, method.bf_filter, method.bf).detail
    if method.tag is Method.BFWLS_AVG:
        detail = fuse_details_avg(d_wls, d_bf)
    else:
        detail = fuse_details_max(d_wls, d_bf, method.max_rule)
    # The NIR base layer is discarded; luminance base comes from the RGB side.
    base = smooth(lc.y, Filter.WLS, method.wls)
    return _assemble(lc, base, detail)


def detail_swap_fuse_ycbcr(rgb: ColorImage, nir, method: FusionMethod) -> FusionResult:
    if method.tag is Method.SWAP_BF:
        kind, params = method.bf_filter, method.bf
    elif method.tag is Method.SWAP_WLS:
        kind, params = Filter.WLS, method.wls
    else:
        raise ValueError(f"{method.name} is not a detail-swap method")
    lc, nir = _prepare(rgb, nir)
    base = smooth(lc.y, kind, params)
    detail = decompose(nir, kind, params).detail
    return _assemble(lc, base, detail)


def bfwls_fuse(rgb: ColorImage, nir, method: FusionMethod) -> ColorImage:
    return bfwls_fuse_ycbcr(rgb, nir, method).image


def detail_swap_fuse(rgb: ColorImage, nir, method: FusionMethod) -> ColorImage:
    return detail_swap_fuse_ycbcr(rgb, nir, method).image


def fuse_ycbcr(rgb: ColorImage, nir, method: FusionMethod) -> FusionResult:
    if method.tag in (Method.BFWLS_AVG, Method.BFWLS_MAX):
        return bfwls_fuse_ycbcr(rgb, nir, method)
    return detail_swap_fuse_ycbcr(rgb, nir, method)


def fuse(rgb: ColorImage, nir, method: FusionMethod) -> ColorImage:
    """Fuse an aligned RGB/NIR pair with any supported method."""
    return fuse_ycbcr(rgb, nir, method).image
