"""Change-detection scoring: confusion counts, the seven metrics, aggregation.

Ground-truth pixels labeled 85 (outside the region of interest) or 170
(unknown motion) are excluded from counting, as is anything outside the ROI
mask or the temporal evaluation range. Shadows (50) count as background, so a
foreground prediction on a shadow pixel is a false positive.

A metric whose denominator is zero is reported as undefined (None), which is
distinct from a legitimate 0.0; aggregation skips undefined entries and flags
them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import frame_io
from .errors import ConfigError, EvaluationError

METRIC_NAMES = ("recall", "specificity", "fpr", "fnr", "pwc", "precision", "f_measure")
METRIC_LABELS = ("Recall", "Specificity", "FPR", "FNR", "PWC", "Precision", "FMeasure")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fn: int = 0
    fp: int = 0
    tn: int = 0

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.fn + other.fn,
            self.fp + other.fp, self.tn + other.tn,
        )

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


def accumulate(
    counts: ConfusionCounts,
    mask: np.ndarray,
    gt: np.ndarray,
    roi: Optional[np.ndarray] = None,
    temporal: Optional[tuple[int, int]] = None,
    frame_index: Optional[int] = None,
) -> ConfusionCounts:
    """Add one frame's pixels to the confusion counts.

    Frames outside the temporal range contribute nothing. The result does not
    depend on the order frames are accumulated in.
    """
    mask = np.asarray(mask)
    gt = np.asarray(gt)
    if mask.shape != gt.shape:
        raise ValueError("mask and ground truth must share shape")
    if temporal is not None:
        if frame_index is None:
            raise ValueError("frame_index is required when a temporal range is given")
        first, last = temporal
        if not first <= frame_index <= last:
            return counts

    valid = (gt != frame_io.GT_OUTSIDE_ROI) & (gt != frame_io.GT_UNKNOWN)
    if roi is not None:
        roi = np.asarray(roi)
        if roi.shape != gt.shape:
            raise ValueError("ROI mask must share shape with ground truth")
        valid &= roi.astype(bool)

    positive = gt == frame_io.GT_FOREGROUND
    predicted = mask != 0
    tp = int(np.count_nonzero(predicted & positive & valid))
    fn = int(np.count_nonzero(~predicted & positive & valid))
    fp = int(np.count_nonzero(predicted & ~positive & valid))
    tn = int(np.count_nonzero(~predicted & ~positive & valid))
    return counts + ConfusionCounts(tp, fn, fp, tn)


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def compute_metrics(counts: ConfusionCounts) -> dict[str, Optional[float]]:
    """The seven scores; None marks an undefined (0/0) entry."""
    tp, fn, fp, tn = counts.tp, counts.fn, counts.fp, counts.tn
    recall = _ratio(tp, tp + fn)
    precision = _ratio(tp, tp + fp)
    if recall is None or precision is None or recall + precision == 0:
        f_measure = None
    else:
        f_measure = 2.0 * recall * precision / (recall + precision)
    return {
        "recall": recall,
        "specificity": _ratio(tn, tn + fp),
        "fpr": _ratio(fp, fp + tn),
        "fnr": _ratio(fn, tp + fn),
        "pwc": _ratio(100 * (fn + fp), counts.total),
        "precision": precision,
        "f_measure": f_measure,
    }


def _mean_metrics(rows: list[dict], scope: str, flags: list[str]) -> dict:
    out = {}
    for name in METRIC_NAMES:
        values = [r[name] for r in rows if r[name] is not None]
        skipped = len(rows) - len(values)
        if skipped:
            flags.append(f"{scope}: {name} undefined for {skipped} of {len(rows)} entries")
        out[name] = float(np.mean(values)) if values else None
    return out


def aggregate(per_video: dict[str, dict[str, dict]]) -> dict:
    """Mean the metrics over videos within a category, then over categories.

    ``per_video`` maps category -> video -> metrics dict. Undefined entries
    are excluded from the means and listed under ``"undefined"``.
    """
    flags: list[str] = []
    categories = {}
    for cat in sorted(per_video):
        rows = [per_video[cat][v] for v in sorted(per_video[cat])]
        categories[cat] = _mean_metrics(rows, cat, flags)
    overall = _mean_metrics(list(categories.values()), "overall", flags)
    videos = {
        f"{cat}/{vid}": per_video[cat][vid]
        for cat in sorted(per_video)
        for vid in sorted(per_video[cat])
    }
    return {
        "videos": videos,
        "categories": categories,
        "overall": overall,
        "undefined": flags,
    }


def discover_dataset(root: str) -> dict[str, list[str]]:
    """Map category -> video names for a dataset tree in the standard layout."""
    found: dict[str, list[str]] = {}
    if not os.path.isdir(root):
        raise ConfigError(f"dataset root is not a directory: {root}")
    for cat in sorted(os.listdir(root)):
        cat_dir = os.path.join(root, cat)
        if not os.path.isdir(cat_dir):
            continue
        videos = []
        for vid in sorted(os.listdir(cat_dir)):
            vid_dir = os.path.join(cat_dir, vid)
            if os.path.isdir(os.path.join(vid_dir, "input")) and os.path.isdir(
                os.path.join(vid_dir, "groundtruth")
            ):
                videos.append(vid)
        if videos:
            found[cat] = videos
    return found


def evaluate_video(results_dir: str, video_dir: str) -> ConfusionCounts:
    """Score one video's masks against its ground truth over the temporal range."""
    temporal = frame_io.load_temporal_roi(os.path.join(video_dir, "temporalROI.txt"))
    roi_path = os.path.join(video_dir, "ROI.bmp")
    roi = frame_io.load_roi(roi_path) if os.path.exists(roi_path) else None
    counts = ConfusionCounts()
    first, last = temporal
    for index in range(first, last + 1):
        gt_path = os.path.join(video_dir, "groundtruth", "gt%06d.png" % index)
        mask_path = os.path.join(results_dir, "bin%06d.png" % index)
        if not os.path.exists(gt_path):
            raise EvaluationError(f"{video_dir}: ground truth missing for frame {index}")
        if not os.path.exists(mask_path):
            raise EvaluationError(
                f"{results_dir}: result mask missing for frame {index} "
                f"(expected one per ground-truth frame)"
            )
        gt = frame_io.load_groundtruth(gt_path)
        mask = frame_io.load_mask(mask_path)
        if mask.shape != gt.shape:
            raise EvaluationError(
                f"{results_dir}: mask {index} shape {mask.shape} != gt {gt.shape}"
            )
        counts = accumulate(counts, mask, gt, roi, temporal, index)
    return counts


def evaluate_results(results_root: str, dataset_root: str) -> dict:
    """Walk a dataset tree and score the mirrored results tree."""
    layout = discover_dataset(dataset_root)
    if not layout:
        raise ConfigError(f"no videos found under dataset root {dataset_root}")
    per_video: dict[str, dict[str, dict]] = {}
    for cat, videos in layout.items():
        per_video[cat] = {}
        for vid in videos:
            video_dir = os.path.join(dataset_root, cat, vid)
            results_dir = os.path.join(results_root, cat, vid)
            if not os.path.isdir(results_dir):
                raise EvaluationError(f"results missing for video {cat}/{vid}")
            counts = evaluate_video(results_dir, video_dir)
            per_video[cat][vid] = compute_metrics(counts)
    return aggregate(per_video)


def format_value(value: Optional[float]) -> str:
    return "   --  " if value is None else f"{value:7.4f}"


def format_table(report: dict) -> str:
    """Aligned text table: videos, categories, then the overall row."""
    name_width = max(
        [len("overall")]
        + [len(k) for k in report["videos"]]
        + [len(k) for k in report["categories"]]
    )
    header = "  ".join([f"{'':<{name_width}}"] + [f"{label:>7}" for label in METRIC_LABELS])
    lines = [header]

    def row(name, metrics):
        cells = [format_value(metrics[m]) for m in METRIC_NAMES]
        lines.append("  ".join([f"{name:<{name_width}}"] + cells))

    for name, metrics in report["videos"].items():
        row(name, metrics)
    if report["videos"]:
        lines.append("-" * len(header))
    for name, metrics in report["categories"].items():
        row(name, metrics)
    row("overall", report["overall"])
    for flag in report["undefined"]:
        lines.append(f"note: {flag}")
    return "\n".join(lines)
