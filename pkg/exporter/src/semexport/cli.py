"""Command line entry point for the map exporter."""

from __future__ import annotations

import argparse
import sys

from .classes import ADE20K_CLASS_NAMES, DEFAULT_FOREGROUND_NAMES
from .errors import ConfigError, ExportError
from .exporter import ExporterConfig, export_maps


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semexport",
        description="Export semantic foreground-probability maps for a frame directory.",
    )
    parser.add_argument("--input", required=True, help="directory of input frames")
    parser.add_argument("--out", required=True, help="directory for sem%%06d outputs")
    parser.add_argument("--model", required=True, help="TorchScript segmentation model")
    parser.add_argument("--pattern", default="in%06d.jpg", help="frame filename pattern")
    parser.add_argument("--start", type=int, default=1, help="first frame index")
    parser.add_argument("--n", type=int, default=1, metavar="N",
                        help="export every N-th frame, counting from the first")
    parser.add_argument("--fg", default=None,
                        help="comma-separated foreground class names (default: common "
                             "moving-object classes)")
    parser.add_argument("--input-multiple", type=int, default=8,
                        help="pad frames so both dims divide this before inference")
    parser.add_argument("--raw-scores", action="store_true",
                        help="write per-class float32 score files instead of 0-255 maps")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    foreground = DEFAULT_FOREGROUND_NAMES
    if args.fg is not None:
        foreground = tuple(name.strip() for name in args.fg.split(",") if name.strip())
    config = ExporterConfig(
        input_dir=args.input,
        out_dir=args.out,
        model_path=args.model,
        pattern=args.pattern,
        frame_start=args.start,
        stride=args.n,
        input_multiple=args.input_multiple,
        class_names=ADE20K_CLASS_NAMES,
        foreground=foreground,
        raw_scores=args.raw_scores,
    )
    try:
        count = export_maps(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    kind = "score files" if args.raw_scores else "semantic maps"
    print(f"wrote {count} {kind} -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
