"""Local binary similarity descriptors over a 5x5 neighborhood.

Each pixel gets one 16-bit pattern per color channel (48 bits total). Bit k is
set when the k-th neighbor is similar to the center, i.e. the absolute
intensity difference stays within ``rel_threshold`` times the center value.
Neighbor coordinates outside the image are clamped to the border.
"""

from __future__ import annotations

import numpy as np

# 16 sample points inside the 5x5 window, (dy, dx).
OFFSETS = np.array(
    [
        (-2, -2), (-2, 0), (-2, 2),
        (-1, -1), (-1, 0), (-1, 1),
        (0, -2), (0, -1), (0, 1), (0, 2),
        (1, -1), (1, 0), (1, 1),
        (2, -2), (2, 0), (2, 2),
    ],
    dtype=np.int64,
)

DEFAULT_REL_THRESHOLD = 0.3


def compute_descriptors(frame: np.ndarray, rel_threshold: float = DEFAULT_REL_THRESHOLD) -> np.ndarray:
    """Compute per-channel descriptors for a frame.

    Returns an (H, W, 3) uint16 array. This is the plain numpy reference;
    the runtime path uses the compiled kernel in _kernels.
    """
    frame = np.asarray(frame)
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise ValueError("frame must be an (H, W, 3) array")
    h, w, _ = frame.shape
    center = frame.astype(np.int16)
    thr = rel_threshold * center.astype(np.float64)
    padded = np.pad(center, ((2, 2), (2, 2), (0, 0)), mode="edge")
    desc = np.zeros((h, w, 3), dtype=np.uint16)
    for k, (dy, dx) in enumerate(OFFSETS):
        neighbor = padded[2 + dy : 2 + dy + h, 2 + dx : 2 + dx + w]
        similar = np.abs(neighbor - center) <= thr
        desc |= similar.astype(np.uint16) << np.uint16(k)
    return desc


def hamming(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Bitwise Hamming distance between descriptor arrays, summed over channels."""
    x = np.bitwise_xor(a.astype(np.uint16), b.astype(np.uint16))
    total = np.zeros(x.shape[:-1], dtype=np.int64)
    for c in range(x.shape[-1]):
        v = x[..., c].astype(np.uint32)
        v = v - ((v >> 1) & 0x5555)
        v = (v & 0x3333) + ((v >> 2) & 0x3333)
        v = (v + (v >> 4)) & 0x0F0F
        total += ((v + (v >> 8)) & 0x001F).astype(np.int64)
    return total
