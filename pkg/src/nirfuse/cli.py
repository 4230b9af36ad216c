"""Command-line interface: ``fuse``, ``eval`` and ``report``.

Exit codes: 0 success, 1 some pairs/methods failed, 2 invalid input or
configuration.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .errors import ConfigError, ConvergenceError, DatasetLayoutError, NirFuseError, ShapeError
from .fusion import FusionMethod, Method, fuse
from .harness.config import parse_config, parse_override
from .harness.report import read_external, read_results, summary_text, write_report
from .harness.runner import run_eval
from .imaging import load_color, load_gray, save_png

EXIT_OK, EXIT_PARTIAL, EXIT_INVALID = 0, 1, 2


def _fuse_cmd(args) -> int:
    try:
        cfg = parse_config(args.config, args.set)
        method = FusionMethod(Method(args.method), cfg.bf_params(), cfg.wls_params(), cfg.max_rule)
        rgb = load_color(args.rgb)
        nir = load_gray(args.nir)
        if rgb.shape != nir.shape:
            raise ShapeError(f"dimension mismatch: rgb {rgb.width}x{rgb.height}, nir {nir.shape[1]}x{nir.shape[0]}")
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    start = time.perf_counter()
    try:
        out = fuse(rgb, nir, method)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    elapsed = time.perf_counter() - start
    try:
        save_png(out, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(f"{method.name}: fused {rgb.width}x{rgb.height} in {elapsed:.3f} s -> {args.out}")
    return EXIT_OK


def _finish_report(report, out_dir, figures: bool) -> None:
    paths = write_report(report, out_dir)
    if figures:
        from .plotting import render_figures

        render_figures(report, Path(out_dir) / "figures")
    print(summary_text(report), end="")
    print(f"wrote {', '.join(str(p) for p in paths.values())}")


def _eval_cmd(args) -> int:
    flags = {
        "dataset_root": args.dataset,
        "methods": args.methods,
        "output_dir": args.out_dir,
        "threads": args.threads,
        "emit_images": True if args.emit_images else None,
    }
    try:
        overrides = dict(parse_override(s) for s in args.set or [])
        overrides.update({k: v for k, v in flags.items() if v is not None})
        cfg = parse_config(args.config, overrides)
        if not cfg.dataset_root:
            raise ConfigError("no dataset given (--dataset or dataset_root)")
        report = run_eval(cfg, use_cache=not args.no_cache)
    except (ConfigError, DatasetLayoutError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NirFuseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    _finish_report(report, cfg.output_dir, cfg.figures)
    if report.failures:
        print(f"{report.failures} row(s) failed or were excluded", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _report_cmd(args) -> int:
    try:
        report = read_results(args.source)
        if args.external:
            report.external = read_external(args.external)
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out_dir = args.out_dir or Path(args.source).parent
    _finish_report(report, out_dir, not args.no_figures)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nirfuse", description="Fuse RGB/NIR image pairs and evaluate feature stability."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    tags = [m.value for m in Method]

    p = sub.add_parser("fuse", help="fuse one RGB/NIR pair")
    p.add_argument("--rgb", required=True)
    p.add_argument("--nir", required=True)
    p.add_argument("--method", default=Method.BFWLS_AVG.value, choices=tags)
    p.add_argument("--out", required=True, help="output PNG path")
    p.add_argument("--config", help="TOML file with filter parameters")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    p.set_defaults(func=_fuse_cmd)

    p = sub.add_parser("eval", help="evaluate fusion methods over a dataset")
    p.add_argument("--dataset")
    p.add_argument("--config")
    p.add_argument("--methods", nargs="+", choices=tags)
    p.add_argument("--out-dir")
    p.add_argument("--threads", type=int, help="worker threads (default: $NIRFUSE_THREADS or 1)")
    p.add_argument("--emit-images", action="store_true", help="also write fused PNGs")
    p.add_argument("--no-cache", action="store_true", help="ignore and do not write the result cache")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    p.set_defaults(func=_eval_cmd)

    p = sub.add_parser("report", help="re-render summaries from a results CSV")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--external", help="CSV of averages for methods run elsewhere")
    p.add_argument("--out-dir")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_report_cmd)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
