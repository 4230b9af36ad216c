"""Locate aligned RGB/NIR pairs on disk."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import NamedTuple

from ..errors import DatasetLayoutError
from ..imaging import SUPPORTED_SUFFIXES

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.csv"


class ImagePair(NamedTuple):
    rgb: Path
    nir: Path
    image_id: str


def _read_manifest(root: Path, manifest: Path) -> list:
    pairs = []
    with open(manifest, newline="") as fh:
        for n, rec in enumerate(csv.DictReader(fh), start=2):
            try:
                rgb, nir, image_id = rec["rgb"], rec["nir"], rec["id"]
            except KeyError:
                raise DatasetLayoutError(
                    f"{manifest}: expected columns id,rgb,nir (line {n})"
                ) from None
            pair = ImagePair(root / rgb, root / nir, image_id)
            missing = [p for p in pair[:2] if not p.is_file()]
            if missing:
                log.warning("manifest line %d: missing %s", n, ", ".join(map(str, missing)))
                continue
            pairs.append(pair)
    return sorted(pairs, key=lambda p: p.image_id)


def discover_pairs(dataset_root, manifest=None) -> list:
    """Find ``<stem>_rgb.<ext>`` / ``<stem>_nir.<ext>`` pairs below ``dataset_root``.

    The id of a pair is its directory relative to the root joined with the
    shared stem, e.g. ``country/0001``.  A ``manifest.csv`` (columns
    ``id,rgb,nir``) in the root, or an explicit ``manifest`` path, replaces
    the suffix scan.
    """
    root = Path(dataset_root)
    if not root.is_dir():
        raise DatasetLayoutError(f"dataset root {root} is not a directory")
    if manifest or (root / MANIFEST_NAME).is_file():
        path = Path(manifest) if manifest else root / MANIFEST_NAME
        pairs = _read_manifest(root, path)
        if not pairs:
            raise DatasetLayoutError(f"manifest {path} lists no usable pairs")
        return pairs

    found = {}
    scanned = 0
    for path in sorted(root.rglob("*")):
        if not path.is_file() or path.suffix.lower() not in SUPPORTED_SUFFIXES:
            continue
        scanned += 1
        stem = path.stem
        for band in ("rgb", "nir"):
            suffix = "_" + band
            if stem.lower().endswith(suffix):
                rel = path.parent.relative_to(root) / stem[: -len(suffix)]
                slot = found.setdefault(rel.as_posix(), {})
                if band in slot:
                    log.warning("duplicate %s image for %s: %s", band, rel.as_posix(), path)
                else:
                    slot[band] = path
                break

    pairs = []
    for image_id, slot in sorted(found.items()):
        if "rgb" in slot and "nir" in slot:
            pairs.append(ImagePair(slot["rgb"], slot["nir"], image_id))
        else:
            have = next(iter(slot.values()))
            log.warning("unpaired image %s (no matching %s)", have, "nir" if "rgb" in slot else "rgb")
    if not pairs:
        raise DatasetLayoutError(
            f"no *_rgb/*_nir pairs under {root} ({scanned} raster files scanned)"
        )
    return pairs
