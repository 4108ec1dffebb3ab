"""Per-pixel fusion of a segmenter mask with semantic evidence.

Decision per pixel, first rule that applies wins:

1. foreground if s_fg >= tau_fg (strong evidence above the semantic model)
2. background if s_bg <= tau_bg (no semantic support at all)
3. otherwise keep the segmenter's label

tau_fg = 256 disables rule 1 (s_fg never exceeds 255) and tau_bg = -1
disables rule 2 (a uint8 map is never negative); together they turn fusion
into a passthrough.
"""

from __future__ import annotations

import numpy as np

DEFAULT_TAU_BG = 0
DEFAULT_TAU_FG = 225


def fuse(raw_mask: np.ndarray, s_bg: np.ndarray, s_fg: np.ndarray,
         tau_bg: int = DEFAULT_TAU_BG, tau_fg: int = DEFAULT_TAU_FG) -> np.ndarray:
    """Fuse one frame; returns a fresh {0,1} uint8 mask."""
    raw = np.asarray(raw_mask)
    s_bg = np.asarray(s_bg)
    s_fg = np.asarray(s_fg)
    if raw.shape != s_bg.shape or raw.shape != s_fg.shape:
        raise ValueError("mask and semantic maps must share shape")
    tau_bg = int(tau_bg)
    tau_fg = int(tau_fg)
    if not -1 <= tau_bg <= 255:
        raise ValueError("tau_bg must be in [-1, 255]")
    if not 0 <= tau_fg <= 256:
        raise ValueError("tau_fg must be in [0, 256]")
    fg = s_fg.astype(np.int64) >= tau_fg
    bg = s_bg.astype(np.int64) <= tau_bg
    return np.where(fg, 1, np.where(bg, 0, raw != 0)).astype(np.uint8)
