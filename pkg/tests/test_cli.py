import csv

import numpy as np
import pytest
from PIL import Image

from nirfuse.cli import main
from conftest import natural_pair, write_dataset


@pytest.fixture
def pair_files(tmp_path):
    rgb, nir = natural_pair("chelsea", (48, 56))
    Image.fromarray(np.round(rgb * 255).astype(np.uint8)).save(tmp_path / "x_rgb.png")
    Image.fromarray(np.round(nir * 255).astype(np.uint8)).save(tmp_path / "x_nir.png")
    return tmp_path / "x_rgb.png", tmp_path / "x_nir.png"


def data_lines(path):
    return [line for line in path.read_text().splitlines() if not line.startswith("# generated")]


def test_fuse_writes_png_and_is_repeatable(tmp_path, pair_files, capsys):
    rgb, nir = pair_files
    for name in ("a.png", "b.png"):
        assert main(["fuse", "--rgb", str(rgb), "--nir", str(nir), "--method", "SWAP_WLS", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()
    assert "SWAP_WLS: fused 56x48" in capsys.readouterr().out
    assert Image.open(tmp_path / "a.png").size == (56, 48)


def test_fuse_dimension_mismatch(tmp_path, pair_files, capsys):
    rgb, _ = pair_files
    Image.fromarray(np.zeros((40, 40), dtype=np.uint8)).save(tmp_path / "small.png")
    code = main(["fuse", "--rgb", str(rgb), "--nir", str(tmp_path / "small.png"), "--out", str(tmp_path / "o.png")])
    assert code == 2
    assert "dimension mismatch" in capsys.readouterr().err


def test_fuse_bad_inputs(tmp_path, pair_files, capsys):
    rgb, nir = pair_files
    out = str(tmp_path / "o.png")
    assert main(["fuse", "--rgb", str(tmp_path / "none.png"), "--nir", str(nir), "--out", out]) == 2
    assert main(["fuse", "--rgb", str(rgb), "--nir", str(nir), "--out", out, "--set", "sigma_space=3"]) == 2
    assert "sigma_spatial" in capsys.readouterr().err


def test_fuse_rejects_unknown_method(pair_files):
    rgb, nir = pair_files
    with pytest.raises(SystemExit) as exc:
        main(["fuse", "--rgb", str(rgb), "--nir", str(nir), "--method", "FANCY", "--out", "o.png"])
    assert exc.value.code == 2


@pytest.fixture
def dataset(tmp_path):
    return write_dataset(tmp_path / "data", ("astronaut", "coffee"), (64, 72))


def test_eval_and_report(tmp_path, dataset, capsys):
    out = tmp_path / "run"
    code = main(["eval", "--dataset", str(dataset), "--out-dir", str(out), "--emit-images", "--set", "transforms=ROT90,SCALE_075"])
    assert code in (0, 1)
    with open(out / "results.csv") as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    assert len(rows) == 2 * 5
    assert {r["image_id"] for r in rows} == {"scene/0000", "scene/0001"}
    summary = (out / "summary.csv").read_text().splitlines()
    header = next(line for line in summary if line.startswith("metric"))
    assert header == "metric,BFWLS_AVG,BFWLS_MAX,SWAP_BF,SWAP_WLS"
    assert len(list((out / "images").glob("*.png"))) == 8
    assert sorted(p.name for p in (out / "figures").iterdir()) == [
        "match_counts.png", "psnr_vs_time.png", "relative_change.png"]
    printed = capsys.readouterr().out
    assert "Metric (Average)" in printed

    # Re-running resumes from the cache and reproduces the results.
    before = data_lines(out / "results.csv")
    main(["eval", "--dataset", str(dataset), "--out-dir", str(out), "--set", "transforms=ROT90,SCALE_075"])
    assert data_lines(out / "results.csv") == before

    # report --from rebuilds the same summary without recomputation.
    redo = tmp_path / "redo"
    assert main(["report", "--from", str(out / "results.csv"), "--out-dir", str(redo), "--no-figures"]) == 0
    assert data_lines(redo / "summary.csv") == data_lines(out / "summary.csv")
    assert not (redo / "figures").exists()


def test_eval_method_subset_and_errors(tmp_path, dataset, capsys):
    out = tmp_path / "run"
    code = main(["eval", "--dataset", str(dataset), "--out-dir", str(out), "--methods", "SWAP_BF", "--no-cache",
                 "--set", "transforms=SCALE_075", "--set", "figures=false"])
    assert code in (0, 1)
    assert not (out / "cache").exists() and not (out / "figures").exists()
    assert main(["eval", "--dataset", str(tmp_path / "missing"), "--out-dir", str(out)]) == 2
    assert main(["eval", "--out-dir", str(out)]) == 2


def test_eval_partial_failure(tmp_path, dataset):
    # A NIR image of the wrong size fails only that pair.
    Image.fromarray(np.zeros((30, 30), dtype=np.uint8)).save(dataset / "scene" / "0001_nir.png")
    out = tmp_path / "run"
    code = main(["eval", "--dataset", str(dataset), "--out-dir", str(out), "--methods", "SWAP_BF",
                 "--set", "transforms=SCALE_075", "--no-cache"])
    assert code == 1
    text = (out / "results.csv").read_text()
    assert "dimension mismatch" in text


def test_report_with_external(tmp_path, dataset):
    out = tmp_path / "run"
    main(["eval", "--dataset", str(dataset), "--out-dir", str(out), "--methods", "SWAP_BF", "--set", "transforms=SCALE_075"])
    ext = tmp_path / "ext.csv"
    ext.write_text("method,rel_change,time,psnr,mse\nEXTERNAL_A,6.76,,32.36,0.000676\n")
    assert main(["report", "--from", str(out / "results.csv"), "--external", str(ext), "--no-figures"]) == 0
    assert "EXTERNAL_A" in (out / "summary.txt").read_text()
    assert main(["report", "--from", str(tmp_path / "nope.csv")]) == 2
