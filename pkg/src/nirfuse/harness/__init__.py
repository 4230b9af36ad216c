"""Dataset batch evaluation and reporting."""

from .config import RunConfig, parse_config, write_config
from .dataset import ImagePair, discover_pairs
from .report import Report, aggregate, read_results, write_report
from .runner import ResultCache, evaluate_image, run_eval

__all__ = [
    "ImagePair",
    "Report",
    "ResultCache",
    "RunConfig",
    "aggregate",
    "discover_pairs",
    "evaluate_image",
    "parse_config",
    "read_results",
    "run_eval",
    "write_config",
    "write_report",
]
