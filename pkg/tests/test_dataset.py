import logging

import pytest

from nirfuse.errors import DatasetLayoutError
from nirfuse.harness.dataset import discover_pairs


def touch(path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"")


def test_suffix_pairs_across_categories(tmp_path):
    for rel in ["urban/0002_rgb.tiff", "urban/0002_nir.tiff", "country/0001_rgb.png", "country/0001_nir.png"]:
        touch(tmp_path / rel)
    pairs = discover_pairs(tmp_path)
    assert [p.image_id for p in pairs] == ["country/0001", "urban/0002"]
    assert pairs[0].rgb.name == "0001_rgb.png" and pairs[0].nir.name == "0001_nir.png"


def test_unpaired_and_stray_files_warn(tmp_path, caplog):
    for rel in ["a/1_rgb.png", "a/1_nir.png", "a/2_rgb.png", "a/readme.txt", "a/3_nir.bmp"]:
        touch(tmp_path / rel)
    with caplog.at_level(logging.WARNING):
        pairs = discover_pairs(tmp_path)
    assert [p.image_id for p in pairs] == ["a/1"]
    assert "unpaired image" in caplog.text and "2_rgb.png" in caplog.text


def test_empty_dataset(tmp_path):
    touch(tmp_path / "x" / "only_rgb.png")
    with pytest.raises(DatasetLayoutError, match="1 raster files"):
        discover_pairs(tmp_path)
    with pytest.raises(DatasetLayoutError):
        discover_pairs(tmp_path / "nope")


def test_manifest_overrides_scan(tmp_path, caplog):
    for rel in ["v/a.png", "i/a.png", "v/b.png", "1_rgb.png", "1_nir.png"]:
        touch(tmp_path / rel)
    (tmp_path / "manifest.csv").write_text("id,rgb,nir\nzeta,v/a.png,i/a.png\nalpha,v/b.png,i/b.png\n")
    with caplog.at_level(logging.WARNING):
        pairs = discover_pairs(tmp_path)
    assert [p.image_id for p in pairs] == ["zeta"]
    assert "missing" in caplog.text


def test_explicit_manifest_and_bad_columns(tmp_path):
    touch(tmp_path / "v.png")
    touch(tmp_path / "n.png")
    m = tmp_path / "list.csv"
    m.write_text("id,rgb,nir\nq,v.png,n.png\n")
    assert discover_pairs(tmp_path, m)[0].image_id == "q"
    m.write_text("name,visible,infrared\nq,v.png,n.png\n")
    with pytest.raises(DatasetLayoutError, match="id,rgb,nir"):
        discover_pairs(tmp_path, m)
