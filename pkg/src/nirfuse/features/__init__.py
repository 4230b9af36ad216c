"""Dense SIFT matching under synthetic transforms."""

from .dsift import DescriptorSet, dense_sift, grid_count
from .evaluate import (
    BASELINE,
    EvalRow,
    baseline_row,
    count_matches,
    evaluate_method,
    evaluate_pair,
    relative_change,
)
from .matching import DEFAULT_THRESHOLD, MatchSet, match_descriptors
from .transforms import DEFAULT_TRANSFORMS, Transform, apply_transform, valid_mask

__all__ = [
    "BASELINE",
    "DEFAULT_THRESHOLD",
    "DEFAULT_TRANSFORMS",
    "DescriptorSet",
    "EvalRow",
    "MatchSet",
    "Transform",
    "apply_transform",
    "baseline_row",
    "count_matches",
    "dense_sift",
    "evaluate_method",
    "evaluate_pair",
    "grid_count",
    "match_descriptors",
    "relative_change",
    "valid_mask",
]
