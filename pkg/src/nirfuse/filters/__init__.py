"""Edge-preserving filters and base/detail decomposition."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..imaging import as_plane
from .bilateral import bilateral_direct, bilateral_fast
from .params import BFParams, WLSParams
from .pcg import FivePointOperator, SolveInfo, solve_spd
from .wls import wls_energy, wls_operator, wls_smooth


class Filter(enum.Enum):
    BF_DIRECT = "bf-direct"
    BF_FAST = "bf-fast"
    WLS = "wls"


@dataclass(frozen=True, eq=False)
class LayerPair:
    base: np.ndarray
    detail: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.base + self.detail


def smooth(src, kind: Filter, params=None) -> np.ndarray:
    """Run the selected filter; ``params`` defaults to that filter's defaults."""
    if kind is Filter.WLS:
        return wls_smooth(src, params or WLSParams())
    if kind is Filter.BF_FAST:
        return bilateral_fast(src, params or BFParams())
    if kind is Filter.BF_DIRECT:
        return bilateral_direct(src, params or BFParams())
    raise ValueError(f"unknown filter {kind!r}")


def decompose(src, kind: Filter, params=None) -> LayerPair:
    """Split a plane into an edge-preserving base and the residual detail."""
    src = as_plane(src)
    base = smooth(src, kind, params)
    return LayerPair(base, src - base)


__all__ = [
    "BFParams",
    "FivePointOperator",
    "Filter",
    "LayerPair",
    "SolveInfo",
    "WLSParams",
    "bilateral_direct",
    "bilateral_fast",
    "decompose",
    "smooth",
    "solve_spd",
    "wls_energy",
    "wls_operator",
    "wls_smooth",
]
