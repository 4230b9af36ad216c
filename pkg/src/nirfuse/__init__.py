"""Visible/near-infrared image fusion with edge-preserving filters, and
feature-stability evaluation of the fused images."""

__version__ = "0.1.0"

from .fusion import FusionMethod, MaxRule, Method, fuse  # noqa: E402
from .imaging import ColorImage, LumaChroma, load_color, load_gray, mse, psnr  # noqa: E402

__all__ = [
    "ColorImage",
    "FusionMethod",
    "LumaChroma",
    "MaxRule",
    "Method",
    "__version__",
    "fuse",
    "load_color",
    "load_gray",
    "mse",
    "psnr",
]
