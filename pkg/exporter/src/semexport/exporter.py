"""Batch export of semantic foreground-probability maps.

Runs a segmentation model over a frame directory and writes one artifact per
refresh position: either an 8-bit grayscale probability map (sem%06d.png,
the consumer's semantic map format) or the raw class scores (sem%06d.bin,
little-endian header h, w, c as int32 followed by float32 scores in C order).

Refresh positions follow the consumer's reuse rule: counting from the first
frame, every stride-th frame gets an artifact, so a downstream run with
semantic_period == stride finds a fresh file exactly where it refreshes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import cv2
import numpy as np

from .classes import ADE20K_CLASS_NAMES, DEFAULT_FOREGROUND_NAMES, resolve_class_indices
from .errors import ConfigError, ExportError
from .model import SegmentationModel


@dataclass
class ExporterConfig:
    input_dir: str
    out_dir: str
    model_path: str
    pattern: str = "in%06d.jpg"
    frame_start: int = 1
    stride: int = 1
    input_multiple: int = 8
    class_names: Sequence[str] = ADE20K_CLASS_NAMES
    foreground: Sequence[str] = DEFAULT_FOREGROUND_NAMES
    raw_scores: bool = False

    def validate(self) -> None:
        if not self.input_dir:
            raise ConfigError("input dir is required")
        if not self.out_dir:
            raise ConfigError("output dir is required")
        if not self.model_path:
            raise ConfigError("model path is required")
        if self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride}")
        if self.input_multiple < 1:
            raise ConfigError(f"input multiple must be >= 1, got {self.input_multiple}")
        if "%" not in self.pattern:
            raise ConfigError(f"pattern needs a frame-number placeholder: {self.pattern!r}")


def collapse_scores(scores: np.ndarray, fg_indices: Sequence[int]) -> np.ndarray:
    """Softmax over classes, sum the foreground mass, map to rounded 0-255.

    Operation-for-operation identical to the consumer's in-core path so that
    a map computed here and one computed downstream from the exported raw
    scores are bit-equal.
    """
    fg = np.asarray(sorted(set(int(c) for c in fg_indices)), dtype=np.int64)
    s = scores.astype(np.float64)
    s -= s.max(axis=2, keepdims=True)
    e = np.exp(s)
    prob = e[..., fg].sum(axis=2) / e.sum(axis=2)
    out = np.floor(255.0 * prob + 0.5)
    return np.clip(out, 0, 255).astype(np.uint8)


def write_score_file(path: str, scores: np.ndarray) -> None:
    h, w, c = scores.shape
    with open(path, "wb") as fh:
        fh.write(np.array([h, w, c], dtype="<i4").tobytes())
        fh.write(scores.astype("<f4").tobytes(order="C"))


def list_frames(config: ExporterConfig) -> list[tuple[int, str]]:
    """Contiguous frame files from frame_start onward, stopping at the first gap."""
    frames = []
    index = config.frame_start
    while True:
        path = os.path.join(config.input_dir, config.pattern % index)
        if not os.path.isfile(path):
            break
        frames.append((index, path))
        index += 1
    return frames


def export_maps(config: ExporterConfig) -> int:
    config.validate()
    fg_indices = resolve_class_indices(config.foreground, config.class_names)
    model = SegmentationModel(config.model_path, config.input_multiple)

    frames = list_frames(config)
    if not frames:
        raise ConfigError(
            f"no input frames matching {config.pattern!r} from index "
            f"{config.frame_start} in {config.input_dir}"
        )

    os.makedirs(config.out_dir, exist_ok=True)
    written = 0
    for position, (index, path) in enumerate(frames):
        if position % config.stride != 0:
            continue
        try:
            bgr = cv2.imread(path, cv2.IMREAD_COLOR)
            if bgr is None:
                raise ValueError("unreadable image file")
            scores = model.scores(cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB))
        except (ValueError, OSError, RuntimeError) as exc:
            raise ExportError(f"inference failed on frame {path}: {exc}") from None

        if len(config.class_names) != scores.shape[2]:
            raise ConfigError(
                f"class table has {len(config.class_names)} names but the model "
                f"emits {scores.shape[2]} channels"
            )

        if config.raw_scores:
            write_score_file(os.path.join(config.out_dir, "sem%06d.bin" % index), scores)
        else:
            sem = collapse_scores(scores, fg_indices)
            out_path = os.path.join(config.out_dir, "sem%06d.png" % index)
            if not cv2.imwrite(out_path, sem):
                raise ExportError(f"cannot write map for frame {path}")
        written += 1
    return written
