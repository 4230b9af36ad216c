"""Batch evaluation over a dataset with a per-image result cache."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

from ..errors import ConfigError, NirFuseError
from ..features import BASELINE, EvalRow, baseline_row, evaluate_method
from ..imaging import load_color, load_gray, save_png
from .config import RunConfig
from .dataset import discover_pairs
from .report import Report

log = logging.getLogger(__name__)


def _safe(image_id: str) -> str:
    return image_id.replace("/", "__")


class ResultCache:
    """JSON files keyed by (image id, method, config hash)."""

    def __init__(self, root, config_hash: str):
        self.root = Path(root)
        self.config_hash = config_hash

    def _path(self, image_id: str, method: str) -> Path:
        return self.root / f"{_safe(image_id)}__{method}__{self.config_hash}.json"

    def get(self, image_id: str, method: str) -> EvalRow | None:
        path = self._path(image_id, method)
        try:
            data = json.loads(path.read_text())
        except (OSError, ValueError):
            return None
        return EvalRow(**data)

    def put(self, row: EvalRow) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self._path(row.image_id, row.method)
        tmp = path.with_suffix(".tmp")
        # +inf PSNR round-trips through json as Infinity.
        tmp.write_text(json.dumps(asdict(row), sort_keys=True))
        tmp.replace(path)


def evaluate_image(pair, cfg: RunConfig, cache: ResultCache | None = None, image_dir=None) -> list:
    """Rows (baseline first) for one pair; errors become error rows."""
    methods = cfg.fusion_methods()
    transforms = cfg.transform_list()
    match_kw = cfg.match_kwargs()
    image_id = pair.image_id

    def cached(method):
        if cache is None:
            return None
        row = cache.get(image_id, method)
        if row is not None and image_dir is not None and method != BASELINE:
            if not (Path(image_dir) / f"{_safe(image_id)}__{method}.png").is_file():
                return None
        return row

    rows = {m: cached(m) for m in [BASELINE] + [m.name for m in methods]}
    if all(r is not None for r in rows.values()):
        return list(rows.values())

    try:
        rgb = load_color(pair.rgb)
        nir = load_gray(pair.nir)
    except (OSError, NirFuseError) as exc:
        log.warning("%s: cannot load pair: %s", image_id, exc)
        msg = f"{type(exc).__name__}: {exc}"
        return [EvalRow(image_id, m, error=msg) for m in rows]

    base = rows[BASELINE]
    if base is None:
        try:
            base = baseline_row(rgb, transforms, image_id, **match_kw)
        except (NirFuseError, ValueError) as exc:
            log.warning("%s: baseline failed: %s", image_id, exc)
            base = EvalRow(image_id, BASELINE, error=f"{type(exc).__name__}: {exc}")
        if cache is not None:
            cache.put(base)
        rows[BASELINE] = base

    for method in methods:
        if rows[method.name] is not None:
            continue
        row, fused = evaluate_method(rgb, nir, method, base, transforms, image_id, **match_kw)
        if fused is not None and image_dir is not None:
            Path(image_dir).mkdir(parents=True, exist_ok=True)
            save_png(fused, Path(image_dir) / f"{_safe(image_id)}__{method.name}.png")
        if cache is not None:
            cache.put(row)
        rows[method.name] = row
    return list(rows.values())


def run_eval(cfg: RunConfig, use_cache: bool = True) -> Report:
    """Evaluate every discovered pair; rows come back sorted by image id."""
    cfg.validate()
    if not cfg.methods:
        raise ConfigError("eval needs at least one fusion method")
    pairs = discover_pairs(cfg.dataset_root, cfg.manifest or None)
    out = Path(cfg.output_dir)
    config_hash = cfg.config_hash()
    cache = ResultCache(out / "cache", config_hash) if use_cache else None
    image_dir = out / "images" if cfg.emit_images else None

    def work(pair):
        return evaluate_image(pair, cfg, cache, image_dir)

    if cfg.threads == 1:
        results = [work(p) for p in pairs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(work, pairs))

    rows = [row for chunk in results for row in chunk]
    report = Report(rows, list(cfg.transforms), config_hash, metadata=cfg.snapshot())
    failed = sum(1 for chunk in results if chunk[0].error is not None)
    if failed == len(pairs):
        raise NirFuseError(f"all {len(pairs)} pairs failed")
    return report
