"""Feature-stability evaluation of fused images against the RGB baseline."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

from ..errors import NirFuseError, UndefinedBaselineError
from ..fusion import FusionMethod, fuse_ycbcr
from ..imaging import ColorImage, luminance, mse, psnr_from_mse
from .dsift import dense_sift
from .matching import DEFAULT_THRESHOLD, match_descriptors
from .transforms import DEFAULT_TRANSFORMS, Transform, apply_transform, valid_mask

log = logging.getLogger(__name__)

BASELINE = "RGB"


@dataclass
class EvalRow:
    image_id: str
    method: str
    counts: dict = field(default_factory=dict)  # transform name -> matches
    rel_change: float | None = None
    psnr: float | None = None
    mse: float | None = None
    fuse_time: float = 0.0
    clamped: int = 0
    error: str | None = None

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def count_matches(
    img: ColorImage,
    transforms=DEFAULT_TRANSFORMS,
    bin_size: int = 8,
    step: int = 4,
    threshold: float = DEFAULT_THRESHOLD,
) -> dict:
    """Ratio-test matches between an image and each transformed copy."""
    ref = dense_sift(luminance(img), bin_size, step)
    counts = {}
    for t in transforms:
        t = Transform(t)
        moved = apply_transform(img, t)
        mask = valid_mask(img.shape, t)
        desc = dense_sift(luminance(moved), bin_size, step, mask=mask)
        counts[t.value] = len(match_descriptors(ref, desc, threshold))
    return counts


def relative_change(fused_counts: dict, rgb_counts: dict) -> float:
    """Percent change of the pooled match count relative to the baseline."""
    if set(fused_counts) != set(rgb_counts):
        raise ValueError("fused and baseline counts cover different transforms")
    base = sum(rgb_counts.values())
    if base == 0:
        raise UndefinedBaselineError("baseline produced no matches")
    return 100.0 * (sum(fused_counts.values()) - base) / base


def baseline_row(rgb: ColorImage, transforms=DEFAULT_TRANSFORMS, image_id: str = "", **match_kw) -> EvalRow:
    counts = count_matches(rgb, transforms, **match_kw)
    return EvalRow(image_id, BASELINE, counts, psnr=math.inf, mse=0.0)


def evaluate_method(
    rgb: ColorImage,
    nir,
    method: FusionMethod,
    baseline: EvalRow,
    transforms=DEFAULT_TRANSFORMS,
    image_id: str = "",
    **match_kw,
) -> tuple[EvalRow, ColorImage | None]:
    """One EvalRow for ``method``; failures become an error row."""
    row = EvalRow(image_id, method.name)
    try:
        start = time.perf_counter()
        result = fuse_ycbcr(rgb, nir, method)
        fused = result.image
        row.fuse_time = time.perf_counter() - start
        row.clamped = result.clamped
        row.mse = mse(fused, rgb)
        row.psnr = psnr_from_mse(row.mse)
        row.counts = count_matches(fused, transforms, **match_kw)
    except (NirFuseError, ValueError, ArithmeticError) as exc:
        log.warning("%s / %s failed: %s", image_id, method.name, exc)
        row.error = f"{type(exc).__name__}: {exc}"
        return row, None
    if baseline.error is None:
        try:
            row.rel_change = relative_change(row.counts, baseline.counts)
        except UndefinedBaselineError as exc:
            row.error = f"{type(exc).__name__}: {exc}"
    return row, fused


def evaluate_pair(
    rgb: ColorImage,
    nir,
    methods=(),
    transforms=DEFAULT_TRANSFORMS,
    image_id: str = "",
    **match_kw,
) -> list:
    """Baseline row followed by one row per fusion method."""
    base = baseline_row(rgb, transforms, image_id, **match_kw)
    rows = [base]
    for method in methods:
        rows.append(evaluate_method(rgb, nir, method, base, transforms, image_id, **match_kw)[0])
    return rows
