"""TorchScript segmentation model wrapper.

Wraps any scripted scene-parsing network that maps a (1, 3, H, W) float image
in [0, 1] to (1, C, H, W) class scores. Frames are reflect-padded so both
spatial dims are a multiple of the network's required granularity, and the
padding is cropped from the output, so callers always get per-pixel scores at
the original resolution.
"""

from __future__ import annotations

import os

import numpy as np
import torch

from .errors import ConfigError


def _pad_amounts(size: int, multiple: int) -> tuple[int, int]:
    total = (-size) % multiple
    before = total // 2
    return before, total - before


class SegmentationModel:
    """CPU inference wrapper around a TorchScript archive."""

    def __init__(self, path: str, input_multiple: int = 8):
        if input_multiple < 1:
            raise ConfigError(f"input multiple must be >= 1, got {input_multiple}")
        if not os.path.isfile(path):
            raise ConfigError(f"model archive not found: {path}")
        try:
            self.module = torch.jit.load(path, map_location="cpu")
        except (RuntimeError, ValueError) as exc:
            raise ConfigError(f"cannot load model archive {path}: {exc}") from None
        self.module.eval()
        self.input_multiple = int(input_multiple)

    def scores(self, frame: np.ndarray) -> np.ndarray:
        """Run one RGB uint8 frame through the network; returns (H, W, C) float32."""
        if frame.ndim != 3 or frame.shape[2] != 3:
            raise ValueError(f"expected an (H, W, 3) frame, got {frame.shape}")
        if frame.dtype != np.uint8:
            raise ValueError(f"expected uint8 frame, got {frame.dtype}")
        h, w = frame.shape[:2]
        top, bottom = _pad_amounts(h, self.input_multiple)
        left, right = _pad_amounts(w, self.input_multiple)

        x = torch.from_numpy(np.ascontiguousarray(frame)).permute(2, 0, 1)
        x = x.unsqueeze(0).float().div_(255.0)
        if top or bottom or left or right:
            # reflect needs pad < dim; replicate covers frames smaller than that
            mode = "reflect" if max(top, bottom) < h and max(left, right) < w else "replicate"
            x = torch.nn.functional.pad(x, (left, right, top, bottom), mode=mode)

        try:
            with torch.no_grad():
                out = self.module(x)
        except Exception as exc:  # TorchScript errors subclass Exception directly
            raise RuntimeError(f"forward pass failed: {exc}") from None
        if not isinstance(out, torch.Tensor):
            raise ValueError(f"model returned {type(out).__name__}, expected a tensor")
        if out.ndim != 4 or out.shape[0] != 1:
            raise ValueError(f"model output must be (1, C, H, W), got {tuple(out.shape)}")
        if out.shape[2] != h + top + bottom or out.shape[3] != w + left + right:
            raise ValueError(
                f"model changed spatial size: fed {h + top + bottom}x{w + left + right}, "
                f"got {out.shape[2]}x{out.shape[3]}"
            )

        out = out[0, :, top : top + h, left : left + w]
        scores = out.permute(1, 2, 0).numpy().astype(np.float32, copy=False)
        return np.ascontiguousarray(scores)
