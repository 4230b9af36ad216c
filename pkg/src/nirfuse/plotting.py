"""Report figures.  Uses the non-interactive Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .features import BASELINE  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def _methods(rows):
    seen = []
    for r in rows:
        if r.method not in seen:
            seen.append(r.method)
    return seen


def plot_relative_change(summary, path):
    names = [m for m, s in summary.items() if s.rel_change is not None]
    vals = [summary[m].rel_change for m in names]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3))
        colors = ["tab:green" if v >= 0 else "tab:red" for v in vals]
        ax.bar(names, vals, color=colors)
        ax.axhline(0, color="k", lw=0.6)
        ax.set_ylabel("relative change in matches (%)")
        ax.set_title("Feature matches vs RGB baseline")
        ax.tick_params(axis="x", rotation=20)
        fig.savefig(path)
        plt.close(fig)


def plot_match_counts(rows, transforms, path):
    """Mean match count per transform, one bar group per method."""
    methods = _methods(rows)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 3))
        width = 0.8 / max(len(methods), 1)
        x = np.arange(len(transforms))
        for i, m in enumerate(methods):
            ok = [r for r in rows if r.method == m and r.counts]
            if not ok:
                continue
            means = [np.mean([r.counts.get(t, 0) for r in ok]) for t in transforms]
            hatch = "//" if m == BASELINE else None
            ax.bar(x + i * width, means, width, label=m, hatch=hatch)
        ax.set_xticks(x + width * (len(methods) - 1) / 2)
        ax.set_xticklabels(transforms)
        ax.set_ylabel("mean matches per image")
        ax.legend(frameon=False, ncol=2)
        fig.savefig(path)
        plt.close(fig)


def plot_quality_vs_time(summary, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4, 3))
        for m, s in summary.items():
            if s.psnr is None or s.time is None or not np.isfinite(s.psnr):
                continue
            ax.scatter(s.time, s.psnr)
            ax.annotate(m, (s.time, s.psnr), xytext=(3, 3), textcoords="offset points", fontsize=7)
        ax.set_xlabel("fusion time (s)")
        ax.set_ylabel("PSNR vs RGB (dB)")
        fig.savefig(path)
        plt.close(fig)


def render_figures(report, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = report.aggregate
    paths = [out / "relative_change.png", out / "match_counts.png", out / "psnr_vs_time.png"]
    plot_relative_change(summary, paths[0])
    plot_match_counts(report.rows, report.transforms, paths[1])
    plot_quality_vs_time(summary, paths[2])
    return paths
