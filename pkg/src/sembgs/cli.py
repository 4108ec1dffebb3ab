"""Command-line interface: run, eval, and sweep.

Exit codes: 0 on success, 1 when processing or scoring fails, 2 for invalid
configuration or arguments.
"""

from __future__ import annotations

import argparse
import csv
import glob
import json
import os
import sys
import tempfile
import time
from dataclasses import replace
from typing import Optional

import numpy as np

from . import evaluation, frame_io
from .config import build_pipeline_config, load_config_file
from .errors import ConfigError, EvaluationError, PipelineError
from .pipeline import PipelineConfig, run_pipeline


def _fresh_seed() -> int:
    return int(np.random.SeedSequence().generate_state(1)[0])


def _config_as_dict(config: PipelineConfig) -> dict:
    return {
        "input_dir": config.input_dir,
        "pattern": config.pattern,
        "frame_start": config.frame_start,
        "frame_end": config.frame_end,
        "segmenter": config.segmenter,
        "segmenter_params": dict(config.segmenter_params),
        "semantic_mode": config.semantic_mode,
        "semantic_dir": config.semantic_dir,
        "semantic_pattern": config.resolved_semantic_pattern(),
        "semantic_period": config.semantic_period,
        "fg_classes": list(config.fg_classes),
        "tau_bg": config.tau_bg,
        "tau_fg": config.tau_fg,
        "phi": config.phi,
        "update_model_on_reused": config.update_model_on_reused,
        "seed": config.seed,
    }


def _apply_run_overrides(config: PipelineConfig, args) -> PipelineConfig:
    updates = {}
    if args.segmenter is not None:
        updates["segmenter"] = args.segmenter
    if args.semantic_dir is not None:
        updates["semantic_dir"] = args.semantic_dir
        if config.semantic_mode == "none":
            updates["semantic_mode"] = "maps"
    if args.n is not None:
        updates["semantic_period"] = args.n
    if args.tau_bg is not None:
        updates["tau_bg"] = args.tau_bg
    if args.tau_fg is not None:
        updates["tau_fg"] = args.tau_fg
    if args.phi is not None:
        updates["phi"] = args.phi
    if args.seed is not None:
        updates["seed"] = args.seed
    return replace(config, **updates) if updates else config


def _execute_run(config: PipelineConfig, out_dir: str) -> dict:
    """Run the pipeline, write masks and timing logs, return the manifest."""
    os.makedirs(out_dir, exist_ok=True)
    frames = 0
    sums = {"bgs_ms": 0.0, "sem_ms": 0.0, "fuse_ms": 0.0}
    wall_start = time.perf_counter()
    timing_path = os.path.join(out_dir, "timings.jsonl")
    with open(timing_path, "w", encoding="ascii") as log:
        for result in run_pipeline(config):
            frame_io.write_mask(
                os.path.join(out_dir, "bin%06d.png" % result.index), result.final_mask
            )
            record = {
                "frame": result.index,
                "bgs_ms": round(result.bgs_ms, 4),
                "sem_ms": round(result.sem_ms, 4),
                "fuse_ms": round(result.fuse_ms, 4),
            }
            log.write(json.dumps(record) + "\n")
            frames += 1
            sums["bgs_ms"] += result.bgs_ms
            sums["sem_ms"] += result.sem_ms
            sums["fuse_ms"] += result.fuse_ms
    wall_s = time.perf_counter() - wall_start
    manifest = {
        "config": _config_as_dict(config),
        "out_dir": os.path.abspath(out_dir),
        "frames": frames,
        "wall_s": round(wall_s, 4),
        "fps": round(frames / wall_s, 2) if wall_s > 0 and frames else None,
        "mean_ms": {
            k: round(v / frames, 4) if frames else None for k, v in sums.items()
        },
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2)
    return manifest


def cmd_run(args) -> int:
    if args.n is not None and args.n < 1:
        print("error: --n: semantic period must be >= 1", file=sys.stderr)
        return 2
    try:
        values = load_config_file(args.config)
        config, extras = build_pipeline_config(values)
        config = _apply_run_overrides(config, args)
        if config.seed is None:
            config = replace(config, seed=_fresh_seed())
        out_dir = args.out or extras.get("out_dir")
        if not out_dir:
            raise ConfigError("no output directory: set --out or out_dir in the config")
        config.validate()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        manifest = _execute_run(config, out_dir)
    except (PipelineError, EvaluationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(
        f"processed {manifest['frames']} frames with {config.segmenter} "
        f"(seed {config.seed}) -> {manifest['out_dir']}"
    )
    return 0


def _check_sem_dir(sem_dir: str, input_dir: Optional[str]) -> int:
    paths = sorted(
        glob.glob(os.path.join(sem_dir, "sem*.png"))
        + glob.glob(os.path.join(sem_dir, "sem*.pgm"))
    )
    if not paths:
        print(f"error: no semantic maps found under {sem_dir}", file=sys.stderr)
        return 1
    expected = None
    if input_dir:
        frames = sorted(glob.glob(os.path.join(input_dir, "in*")))
        if not frames:
            print(f"error: no input frames under {input_dir}", file=sys.stderr)
            return 1
        expected = frame_io.load_frame(frames[0]).shape[:2]
    shape = None
    for path in paths:
        try:
            sem = frame_io.load_semantic_map(path)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        if shape is None:
            shape = sem.shape
        elif sem.shape != shape:
            print(f"error: {path} has shape {sem.shape}, others are {shape}",
                  file=sys.stderr)
            return 1
        if expected is not None and sem.shape != expected:
            print(f"error: {path} has shape {sem.shape}, frames are {expected}",
                  file=sys.stderr)
            return 1
    print(f"checked {len(paths)} semantic maps ({shape[0]}x{shape[1]}): OK")
    return 0


def cmd_eval(args) -> int:
    if args.check_sem:
        return _check_sem_dir(args.check_sem, args.input)
    if not args.results or not args.dataset:
        print("error: eval needs --results and --dataset (or --check-sem)",
              file=sys.stderr)
        return 2
    try:
        report = evaluation.evaluate_results(args.results, args.dataset)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EvaluationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(evaluation.format_table(report))
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            json.dump(report, fh, indent=2)
    return 0


_SWEEP_PARAMS = ("tau_bg", "tau_fg", "phi", "n")


def cmd_sweep(args) -> int:
    try:
        values = [int(part) for part in args.values.split(",") if part.strip()]
        if not values:
            raise ValueError("empty value list")
    except ValueError as exc:
        print(f"error: --values: {exc}", file=sys.stderr)
        return 2
    try:
        raw = load_config_file(args.config)
        config, _ = build_pipeline_config(raw)
        if config.seed is None:
            config = replace(config, seed=_fresh_seed())
        video_dir = os.path.dirname(os.path.abspath(config.input_dir))
        if not os.path.isdir(os.path.join(video_dir, "groundtruth")):
            raise ConfigError(
                f"no ground truth next to {config.input_dir}; sweeps need the "
                f"standard video layout"
            )
        field = "semantic_period" if args.param == "n" else args.param
        configs = []
        for value in values:
            cfg = replace(config, **{field: value})
            cfg.validate()
            configs.append(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    rows = []
    try:
        for cfg, value in zip(configs, values):
            with tempfile.TemporaryDirectory(prefix="sembgs-sweep-") as tmp:
                _execute_run(cfg, tmp)
                counts = evaluation.evaluate_video(tmp, video_dir)
            metrics = evaluation.compute_metrics(counts)
            rows.append((value, metrics))
            shown = metrics["f_measure"]
            print(f"{args.param}={value}: f_measure="
                  f"{'undefined' if shown is None else f'{shown:.4f}'}")
    except (PipelineError, EvaluationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    with open(args.out, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["param", "value", *evaluation.METRIC_NAMES])
        for value, metrics in rows:
            writer.writerow(
                [args.param, value]
                + ["" if metrics[m] is None else f"{metrics[m]:.6f}"
                   for m in evaluation.METRIC_NAMES]
            )
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sembgs",
        description="Background subtraction with semantic fusion feedback",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="process a sequence and write masks")
    p_run.add_argument("--config", required=True, help="flat key/value config file")
    p_run.add_argument("--segmenter", choices=("subsense", "vibe", "gmm"))
    p_run.add_argument("--semantic-dir", dest="semantic_dir")
    p_run.add_argument("--n", type=int, help="semantic refresh period")
    p_run.add_argument("--tau-bg", dest="tau_bg", type=int)
    p_run.add_argument("--tau-fg", dest="tau_fg", type=int)
    p_run.add_argument("--phi", type=int)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--out", help="output directory for masks and logs")
    p_run.set_defaults(func=cmd_run)

    p_eval = sub.add_parser("eval", help="score result masks against ground truth")
    p_eval.add_argument("--results", help="root of the result mask tree")
    p_eval.add_argument("--dataset", help="root of the dataset tree")
    p_eval.add_argument("--out", help="write the report as JSON here")
    p_eval.add_argument("--check-sem", dest="check_sem",
                        help="validate a directory of semantic maps instead")
    p_eval.add_argument("--input", help="frame directory to check map sizes against")
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="run and score a parameter sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--param", required=True, choices=_SWEEP_PARAMS)
    p_sweep.add_argument("--values", required=True, help="comma-separated integers")
    p_sweep.add_argument("--out", default="sweep.csv", help="CSV output path")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
