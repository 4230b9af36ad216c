import csv
import math

import pytest

from nirfuse.features import BASELINE, EvalRow
from nirfuse.harness.report import (
    RESULTS_CSV,
    Report,
    aggregate,
    read_external,
    read_results,
    results_csv,
    summary_csv,
    summary_text,
    write_report,
)
from nirfuse.plotting import render_figures

TRANSFORMS = ["ROT90", "SCALE_050"]


def sample_rows():
    return [
        EvalRow("a", BASELINE, {"ROT90": 10, "SCALE_050": 30}, psnr=math.inf, mse=0.0),
        EvalRow("a", "BFWLS_AVG", {"ROT90": 12, "SCALE_050": 32}, 10.0, 30.0, 1e-3, 1.5, 2),
        EvalRow("a", "SWAP_BF", {"ROT90": 9, "SCALE_050": 27}, -10.0, 20.0, 1e-2, 0.5),
        EvalRow("b", BASELINE, {"ROT90": 5, "SCALE_050": 15}, psnr=math.inf, mse=0.0),
        EvalRow("b", "BFWLS_AVG", {"ROT90": 4, "SCALE_050": 15}, -5.0, 40.0, 1e-4, 2.5),
        EvalRow("b", "SWAP_BF", error="ShapeError: dimension mismatch"),
    ]


def test_aggregate_means_and_exclusions():
    agg = aggregate(sample_rows())
    assert list(agg) == ["BFWLS_AVG", "SWAP_BF"]
    avg = agg["BFWLS_AVG"]
    assert (avg.rel_change, avg.time, avg.psnr, avg.images, avg.excluded) == (2.5, 2.0, 35.0, 2, 0)
    assert avg.mse == pytest.approx(5.5e-4)
    swap = agg["SWAP_BF"]
    assert (swap.rel_change, swap.images, swap.excluded) == (-10.0, 1, 1)


def test_results_csv_layout():
    text = results_csv(Report(sample_rows(), TRANSFORMS, "abc123"), timestamp="T")
    lines = text.splitlines()
    assert lines[0].endswith("config=abc123") and lines[1] == "# generated T"
    assert lines[2] == "image_id,method,ROT90,SCALE_050,total,rel_change,psnr,mse,clamped,error"
    assert lines[3] == "a,RGB,10,30,40,,inf,0.0,0,"
    assert lines[4] == "a,BFWLS_AVG,12,32,44,10.0,30.0,0.001,2,"
    assert lines[-1] == "b,SWAP_BF,,,,,,,0,ShapeError: dimension mismatch"


def test_round_trip_recomputes_summary(tmp_path):
    report = Report(sample_rows(), TRANSFORMS, "abc123")
    write_report(report, tmp_path, timestamp="T")
    back = read_results(tmp_path / RESULTS_CSV)
    assert back.config_hash == "abc123" and back.transforms == TRANSFORMS
    assert back.aggregate == report.aggregate
    assert summary_csv(back, "T") == (tmp_path / "summary.csv").read_text()


def test_summary_csv_shape():
    text = summary_csv(Report(sample_rows(), TRANSFORMS), "T")
    rows = list(csv.reader(line for line in text.splitlines() if not line.startswith("#")))
    assert rows[0] == ["metric", "BFWLS_AVG", "SWAP_BF"]
    assert [r[0] for r in rows[1:]] == ["Rel. Change (%)", "Time (Sec)", "PSNR", "MSE", "Images", "Excluded"]
    assert rows[1][1:] == ["2.5", "-10.0"]


def test_summary_text_alignment_and_units():
    text = summary_text(Report(sample_rows(), TRANSFORMS))
    lines = text.splitlines()[1:]
    assert lines[0].split() == ["Metric", "(Average)", "BFWLS_AVG", "SWAP_BF"]
    assert set(lines[1]) <= {"-", " "}
    mse_line = next(line for line in lines if line.startswith("MSE"))
    # 5.5e-4 is shown as 5.50 in units of 1e-4.
    assert mse_line.split()[-2:] == ["5.50", "100.00"]
    widths = {len(line) for line in lines[:2]}
    assert len(widths) == 1


def test_external_columns(tmp_path):
    ext = tmp_path / "ext.csv"
    ext.write_text("method,rel_change,time,psnr,mse\nEXTERNAL_A,6.76,190.0,32.36,\nEXTERNAL_B,,,,\n")
    report = Report(sample_rows(), TRANSFORMS, external=read_external(ext))
    text = summary_text(report)
    header = text.splitlines()[1].split()
    assert header[-2:] == ["EXTERNAL_A", "EXTERNAL_B"]
    rel = next(line for line in text.splitlines() if line.startswith("Rel. Change"))
    assert rel.split()[-2:] == ["6.76", "-"]


def test_figures_are_written(tmp_path):
    paths = render_figures(Report(sample_rows(), TRANSFORMS), tmp_path)
    for p in paths:
        assert p.stat().st_size > 0
        assert p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
