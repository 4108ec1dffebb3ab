"""Frame, mask, and dataset file I/O.

In-memory conventions used across the package:

* video frame: uint8 array of shape (H, W, 3), RGB channel order
* foreground mask: uint8 array of shape (H, W), values {0, 1}, 1 = foreground
* semantic map: uint8 array of shape (H, W), 0..255 foreground evidence
* ground-truth frame: uint8 array of shape (H, W) with the change-detection
  label codes {0, 50, 85, 170, 255}
* region-of-interest mask: bool array of shape (H, W), True = evaluated

On disk, masks are 8-bit grayscale PNGs with foreground at 255 and background
at 0, named ``bin%06d.png``. Semantic maps are 8-bit single-channel PNG or PGM
files named ``sem%06d.png`` / ``sem%06d.pgm``. A dataset video directory
follows the change-detection layout: ``input/in%06d.jpg``,
``groundtruth/gt%06d.png``, ``ROI.bmp`` and ``temporalROI.txt``.
"""

from __future__ import annotations

import os
import re
from typing import Iterator, Optional

import cv2
import numpy as np

from .errors import FormatError

# Ground-truth label codes.
GT_BACKGROUND = 0
GT_SHADOW = 50
GT_OUTSIDE_ROI = 85
GT_UNKNOWN = 170
GT_FOREGROUND = 255

_GT_CODES = frozenset({GT_BACKGROUND, GT_SHADOW, GT_OUTSIDE_ROI, GT_UNKNOWN, GT_FOREGROUND})


def load_frame(path: str) -> np.ndarray:
    """Load one video frame as an (H, W, 3) uint8 RGB array."""
    if not os.path.exists(path):
        raise OSError(f"frame file not found: {path}")
    img = cv2.imread(path, cv2.IMREAD_COLOR)
    if img is None:
        raise OSError(f"unreadable frame file: {path}")
    return cv2.cvtColor(img, cv2.COLOR_BGR2RGB)


def load_sequence(
    directory: str,
    pattern: str = "in%06d.jpg",
    start: int = 1,
    end: Optional[int] = None,
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (index, frame) pairs for consecutive indices found on disk.

    Iteration begins at ``start`` and stops at the first missing index, at
    ``end`` (inclusive) if given, or immediately if the first file is absent.
    All frames must share dimensions; a mismatch raises FormatError.
    """
    shape = None
    index = start
    while end is None or index <= end:
        path = os.path.join(directory, pattern % index)
        if not os.path.exists(path):
            return
        frame = load_frame(path)
        if shape is None:
            shape = frame.shape
        elif frame.shape != shape:
            raise FormatError(
                f"frame {path} has shape {frame.shape[:2]}, expected {shape[:2]}"
            )
        yield index, frame
        index += 1


def sequence_indices(directory: str, pattern: str = "in%06d.jpg", start: int = 1,
                     end: Optional[int] = None) -> list[int]:
    """Indices that load_sequence would yield, without reading pixel data."""
    out = []
    index = start
    while end is None or index <= end:
        if not os.path.exists(os.path.join(directory, pattern % index)):
            break
        out.append(index)
        index += 1
    return out


def _read_gray(path: str) -> np.ndarray:
    if not os.path.exists(path):
        raise OSError(f"file not found: {path}")
    img = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if img is None:
        raise OSError(f"unreadable image file: {path}")
    return img


def load_semantic_map(path: str) -> np.ndarray:
    """Load an 8-bit single-channel semantic foreground map, byte for byte."""
    img = _read_gray(path)
    if img.ndim != 2:
        raise FormatError(f"semantic map must be single-channel: {path}")
    if img.dtype != np.uint8:
        raise FormatError(f"semantic map must be 8-bit: {path} has dtype {img.dtype}")
    return img


def write_semantic_map(path: str, sem: np.ndarray) -> None:
    """Write a semantic map as 8-bit grayscale; format chosen by extension."""
    sem = np.asarray(sem)
    if sem.ndim != 2 or sem.dtype != np.uint8:
        raise ValueError("semantic map must be an (H, W) uint8 array")
    if not cv2.imwrite(path, sem):
        raise OSError(f"failed to write semantic map: {path}")


def load_groundtruth(path: str) -> np.ndarray:
    """Load a ground-truth frame, validating its label codes."""
    img = _read_gray(path)
    if img.ndim == 3:
        # Some tools save the single-channel labels as RGB triplets.
        if not (img[..., 0] == img[..., 1]).all() or not (img[..., 1] == img[..., 2]).all():
            raise FormatError(f"ground truth has non-gray pixels: {path}")
        img = img[..., 0]
    if img.dtype != np.uint8:
        raise FormatError(f"ground truth must be 8-bit: {path}")
    bad = np.setdiff1d(np.unique(img), sorted(_GT_CODES))
    if bad.size:
        raise FormatError(f"ground truth {path} contains invalid codes {bad.tolist()}")
    return img


def load_roi(path: str) -> np.ndarray:
    """Load a region-of-interest image; nonzero pixels are included."""
    img = _read_gray(path)
    if img.ndim == 3:
        img = img.max(axis=2)
    return img != 0


def load_temporal_roi(path: str) -> tuple[int, int]:
    """Read the two integers (first, last evaluated frame) from temporalROI.txt."""
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    parts = re.split(r"\s+", text.strip())
    if len(parts) != 2:
        raise FormatError(f"temporal ROI file must hold two integers: {path}")
    try:
        first, last = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise FormatError(f"temporal ROI file must hold two integers: {path}") from exc
    if first > last:
        raise FormatError(f"temporal ROI range is empty: {path}")
    return first, last


def write_mask(path: str, mask: np.ndarray) -> None:
    """Write a {0,1} foreground mask as a 0/255 grayscale PNG."""
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValueError("mask must be an (H, W) array")
    out = np.where(mask != 0, 255, 0).astype(np.uint8)
    if not cv2.imwrite(path, out):
        raise OSError(f"failed to write mask: {path}")


def load_mask(path: str) -> np.ndarray:
    """Load a mask written by write_mask back to {0,1} uint8."""
    img = _read_gray(path)
    if img.ndim == 3:
        img = img[..., 0]
    return (img > 127).astype(np.uint8)


def read_scores(path: str) -> np.ndarray:
    """Read a raw per-class score file.

    Layout: three little-endian int32 values (height, width, num_classes)
    followed by float32 scores in (H, W, C) C-order.
    """
    with open(path, "rb") as fh:
        header = np.frombuffer(fh.read(12), dtype="<i4")
        if header.size != 3:
            raise FormatError(f"truncated score header: {path}")
        h, w, c = (int(v) for v in header)
        if h <= 0 or w <= 0 or c <= 0:
            raise FormatError(f"invalid score dimensions {h}x{w}x{c}: {path}")
        payload = fh.read(4 * h * w * c)
    if len(payload) != 4 * h * w * c:
        raise FormatError(f"truncated score data: {path}")
    data = np.frombuffer(payload, dtype="<f4")
    return data.reshape(h, w, c)


def write_scores(path: str, scores: np.ndarray) -> None:
    """Write raw per-class scores in the binary layout read_scores expects."""
    scores = np.asarray(scores, dtype=np.float32)
    if scores.ndim != 3:
        raise ValueError("scores must be an (H, W, C) array")
    h, w, c = scores.shape
    with open(path, "wb") as fh:
        fh.write(np.array([h, w, c], dtype="<i4").tobytes())
        fh.write(scores.astype("<f4").tobytes(order="C"))
