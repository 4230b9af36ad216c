"""Per-image CSV rows and the per-method summary table.

Output files in a run directory:

``results.csv``
    one row per (image, method), match counts and quality metrics.  Fully
    deterministic apart from the ``# generated`` line.
``timings.csv``
    wall-clock fusion time per (image, method).  Kept apart from the results
    because timing never reproduces bit for bit.
``summary.csv`` / ``summary.txt``
    per-method averages: relative change, time, PSNR and MSE.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

from .. import __version__
from ..features import BASELINE, EvalRow

RESULTS_CSV = "results.csv"
TIMINGS_CSV = "timings.csv"
SUMMARY_CSV = "summary.csv"
SUMMARY_TXT = "summary.txt"

METRICS = ("Rel. Change (%)", "Time (Sec)", "PSNR", "MSE")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_float(s: str):
    return None if s == "" else float(s)


@dataclass
class MethodSummary:
    rel_change: float | None = None
    time: float | None = None
    psnr: float | None = None
    mse: float | None = None
    images: int = 0
    excluded: int = 0

    def metric(self, name: str):
        return {
            "Rel. Change (%)": self.rel_change,
            "Time (Sec)": self.time,
            "PSNR": self.psnr,
            "MSE": self.mse,
        }[name]


def _mean(values):
    values = list(values)
    return math.fsum(values) / len(values) if values else None


def aggregate(rows) -> dict:
    """Per-method means over rows without an error flag.

    Errors cover failed fusions and images whose baseline had no matches;
    they are counted in ``excluded``.  The baseline itself is not summarised.
    """
    by_method = {}
    for row in rows:
        if row.method == BASELINE:
            continue
        by_method.setdefault(row.method, []).append(row)
    out = {}
    for method, group in by_method.items():
        ok = [r for r in group if r.error is None]
        out[method] = MethodSummary(
            rel_change=_mean(r.rel_change for r in ok),
            time=_mean(r.fuse_time for r in ok),
            psnr=_mean(r.psnr for r in ok),
            mse=_mean(r.mse for r in ok),
            images=len(ok),
            excluded=len(group) - len(ok),
        )
    return out


@dataclass
class Report:
    rows: list
    transforms: list
    config_hash: str = ""
    metadata: dict = field(default_factory=dict)
    external: dict = field(default_factory=dict)  # method -> MethodSummary

    @property
    def aggregate(self) -> dict:
        return aggregate(self.rows)

    @property
    def failures(self) -> int:
        return sum(1 for r in self.rows if r.error is not None)


def _header(config_hash: str, timestamp: str | None) -> list:
    lines = [f"# nirfuse {__version__} config={config_hash}"]
    stamp = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    lines.append(f"# generated {stamp}")
    return lines


def results_csv(report: Report, timestamp: str | None = None) -> str:
    buf = io.StringIO()
    buf.write("\n".join(_header(report.config_hash, timestamp)) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    cols = ["image_id", "method", *report.transforms, "total", "rel_change", "psnr", "mse", "clamped", "error"]
    writer.writerow(cols)
    for r in report.rows:
        counts = [r.counts.get(t, "") for t in report.transforms]
        total = r.total if r.counts else ""
        writer.writerow(
            [r.image_id, r.method, *counts, total, *map(_fmt, (r.rel_change, r.psnr, r.mse)), r.clamped, r.error or ""]
        )
    return buf.getvalue()


def timings_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["image_id", "method", "fuse_time"])
    for r in report.rows:
        if r.method != BASELINE:
            writer.writerow([r.image_id, r.method, _fmt(float(r.fuse_time))])
    return buf.getvalue()


def _columns(report: Report) -> dict:
    cols = dict(report.aggregate)
    for name, summary in report.external.items():
        cols.setdefault(name, summary)
    return cols


def summary_csv(report: Report, timestamp: str | None = None) -> str:
    cols = _columns(report)
    buf = io.StringIO()
    buf.write("\n".join(_header(report.config_hash, timestamp)) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", *cols])
    for metric in METRICS:
        writer.writerow([metric, *(_fmt(s.metric(metric)) for s in cols.values())])
    writer.writerow(["Images", *(s.images for s in cols.values())])
    writer.writerow(["Excluded", *(s.excluded for s in cols.values())])
    return buf.getvalue()


def _cell(v, scale=1.0) -> str:
    if v is None:
        return "-"
    if math.isinf(v):
        return "inf"
    return f"{v * scale:.2f}"


def summary_text(report: Report) -> str:
    """Aligned plain-text table, MSE shown in units of 1e-4."""
    cols = _columns(report)
    table = [["Metric (Average)", *cols]]
    table.append(["Rel. Change (%)", *(_cell(s.rel_change) for s in cols.values())])
    table.append(["Time (Sec)", *(_cell(s.time) for s in cols.values())])
    table.append(["PSNR", *(_cell(s.psnr) for s in cols.values())])
    table.append(["MSE (1e-4)", *(_cell(s.mse, 1e4) for s in cols.values())])
    table.append(["Images", *(str(s.images) for s in cols.values())])
    table.append(["Excluded", *(str(s.excluded) for s in cols.values())])
    widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
    lines = [f"# nirfuse {__version__} config={report.config_hash}"]
    for n, row in enumerate(table):
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def write_report(report: Report, out_dir, timestamp: str | None = None) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        RESULTS_CSV: results_csv(report, timestamp),
        TIMINGS_CSV: timings_csv(report),
        SUMMARY_CSV: summary_csv(report, timestamp),
        SUMMARY_TXT: summary_text(report),
    }
    paths = {}
    for name, text in files.items():
        path = out / name
        path.write_text(text)
        paths[name] = path
    return paths


def read_results(path) -> Report:
    """Load a results.csv (and its sibling timings.csv, if present)."""
    path = Path(path)
    text = path.read_text()
    config_hash = ""
    body = []
    for line in text.splitlines():
        if line.startswith("# nirfuse") and "config=" in line:
            config_hash = line.split("config=", 1)[1].strip()
        elif not line.startswith("#"):
            body.append(line)
    reader = csv.DictReader(body)
    fixed = {"image_id", "method", "total", "rel_change", "psnr", "mse", "clamped", "error"}
    transforms = [c for c in reader.fieldnames or [] if c not in fixed]
    rows = []
    for rec in reader:
        counts = {t: int(rec[t]) for t in transforms if rec[t] != ""}
        rows.append(
            EvalRow(
                image_id=rec["image_id"],
                method=rec["method"],
                counts=counts,
                rel_change=_parse_float(rec["rel_change"]),
                psnr=_parse_float(rec["psnr"]),
                mse=_parse_float(rec["mse"]),
                clamped=int(rec["clamped"] or 0),
                error=rec["error"] or None,
            )
        )
    timings = path.with_name(TIMINGS_CSV)
    if timings.is_file():
        with open(timings, newline="") as fh:
            times = {(r["image_id"], r["method"]): float(r["fuse_time"]) for r in csv.DictReader(fh)}
        for row in rows:
            row.fuse_time = times.get((row.image_id, row.method), 0.0)
    return Report(rows, transforms, config_hash)


def read_external(path) -> dict:
    """Read externally obtained method averages.

    Columns: ``method,rel_change,time,psnr,mse``; any cell may be empty.
    """
    out = {}
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            out[rec["method"]] = MethodSummary(
                rel_change=_parse_float(rec.get("rel_change", "")),
                time=_parse_float(rec.get("time", "")),
                psnr=_parse_float(rec.get("psnr", "")),
                mse=_parse_float(rec.get("mse", "")),
            )
    return out
