"""Sample-consensus background segmenter with per-pixel feedback control.

Each pixel keeps a bank of color/descriptor samples plus four controller
values: a distance threshold scale R, an update period T, a running minimal
distance D_min, and a blink accumulator v. Classification compares the
incoming pixel against the bank; the feedback step adapts the controllers
from the observed distances, label blinking, and the caller-supplied final
mask (which may differ from the raw mask when a fusion stage sits between).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import cv2
import numpy as np

from . import _kernels
from .lbsp import DEFAULT_REL_THRESHOLD


@dataclass
class SubsenseParams:
    num_samples: int = 50
    min_matches: int = 2
    color_threshold: int = 30       # per-channel base distance, scaled by R
    lbsp_threshold: int = 3         # Hamming base distance, scaled by floor(R)
    lbsp_rel_threshold: float = DEFAULT_REL_THRESHOLD
    alpha: float = 0.04             # D_min exponential smoothing factor
    v_incr: float = 1.0
    v_decr: float = 0.1
    v_floor: float = 0.1
    r_lower: float = 1.0
    t_lower: float = 2.0
    t_upper: float = 256.0
    eps: float = 1e-6               # guards D_min denominators
    median_filter: bool = True
    median_size: int = 9

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValueError("num_samples must be >= 1")
        if self.min_matches < 1 or self.min_matches > self.num_samples:
            raise ValueError("min_matches must be in [1, num_samples]")
        if self.t_lower < 1 or self.t_upper < self.t_lower:
            raise ValueError("update period bounds must satisfy 1 <= t_lower <= t_upper")
        if self.median_size % 2 == 0:
            raise ValueError("median_size must be odd")


@dataclass
class SubsenseModel:
    params: SubsenseParams
    bank_color: np.ndarray          # (H, W, N, 3) uint8
    bank_desc: np.ndarray           # (H, W, N, 3) uint16
    r: np.ndarray                   # (H, W) float64, >= r_lower
    t: np.ndarray                   # (H, W) float64, in [t_lower, t_upper]
    dmin: np.ndarray                # (H, W) float64, in [0, 1]
    v: np.ndarray                   # (H, W) float64, >= v_floor
    prev_raw: np.ndarray            # (H, W) uint8, previous raw mask
    rng: np.random.Generator = field(repr=False, default=None)

    @property
    def shape(self) -> tuple[int, int]:
        return self.bank_color.shape[0], self.bank_color.shape[1]


def _as_rng(rng: Union[np.random.Generator, int, None]) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def compute_descriptors(frame: np.ndarray, rel_threshold: float) -> np.ndarray:
    out = np.empty(frame.shape[:2] + (3,), dtype=np.uint16)
    _kernels.lbsp_kernel(np.ascontiguousarray(frame), rel_threshold, out)
    return out


def _check_frame(frame: np.ndarray, shape=None) -> np.ndarray:
    frame = np.asarray(frame)
    if frame.ndim != 3 or frame.shape[2] != 3 or frame.dtype != np.uint8:
        raise ValueError("frame must be an (H, W, 3) uint8 array")
    if shape is not None and frame.shape[:2] != shape:
        raise ValueError(f"frame shape {frame.shape[:2]} does not match model {shape}")
    return frame


def subsense_init(
    first_frames: list[np.ndarray],
    params: Optional[SubsenseParams] = None,
    rng: Union[np.random.Generator, int, None] = None,
) -> SubsenseModel:
    """Build a model from one or more bootstrap frames.

    Every sample is drawn from a random bootstrap frame at the pixel itself or
    one of its 8 neighbors (clamped at the border), so a single constant frame
    yields a bank filled with that frame's values.
    """
    if not first_frames:
        raise ValueError("at least one bootstrap frame is required")
    params = params or SubsenseParams()
    rng = _as_rng(rng)
    frames = [np.ascontiguousarray(_check_frame(f)) for f in first_frames]
    h, w = frames[0].shape[:2]
    for f in frames[1:]:
        _check_frame(f, (h, w))
    stack = np.stack(frames)
    descs = np.stack([compute_descriptors(f, params.lbsp_rel_threshold) for f in frames])

    n = params.num_samples
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]
    bank_color = np.empty((h, w, n, 3), dtype=np.uint8)
    bank_desc = np.empty((h, w, n, 3), dtype=np.uint16)
    for k in range(n):
        fidx = rng.integers(0, len(frames), size=(h, w))
        dy = rng.integers(-1, 2, size=(h, w))
        dx = rng.integers(-1, 2, size=(h, w))
        sy = np.clip(rows + dy, 0, h - 1)
        sx = np.clip(cols + dx, 0, w - 1)
        bank_color[:, :, k, :] = stack[fidx, sy, sx]
        bank_desc[:, :, k, :] = descs[fidx, sy, sx]

    return SubsenseModel(
        params=params,
        bank_color=bank_color,
        bank_desc=bank_desc,
        r=np.full((h, w), params.r_lower, dtype=np.float64),
        t=np.full((h, w), params.t_lower, dtype=np.float64),
        dmin=np.zeros((h, w), dtype=np.float64),
        v=np.full((h, w), params.v_floor, dtype=np.float64),
        prev_raw=np.zeros((h, w), dtype=np.uint8),
        rng=rng,
    )


def apply_median(mask: np.ndarray, size: int) -> np.ndarray:
    """Majority-smooth a {0,1} mask with a size x size median filter."""
    blurred = cv2.medianBlur(np.where(mask != 0, 255, 0).astype(np.uint8), size)
    return (blurred > 127).astype(np.uint8)


def classify_with_descriptors(model: SubsenseModel, frame: np.ndarray):
    """Classify a frame; returns (mask, dmin_obs, descriptors).

    Does not mutate the model. The descriptor array can be handed to
    subsense_feedback_update to avoid recomputing it.
    """
    frame = np.ascontiguousarray(_check_frame(frame, model.shape))
    p = model.params
    desc = compute_descriptors(frame, p.lbsp_rel_threshold)
    h, w = model.shape
    mask = np.empty((h, w), dtype=np.uint8)
    dmin_obs = np.empty((h, w), dtype=np.float64)
    _kernels.subsense_classify_kernel(
        frame, desc, model.bank_color, model.bank_desc, model.r,
        float(p.color_threshold), p.lbsp_threshold, p.min_matches,
        mask, dmin_obs,
    )
    if p.median_filter:
        mask = apply_median(mask, p.median_size)
    return mask, dmin_obs, desc


def subsense_classify(model: SubsenseModel, frame: np.ndarray):
    """Classify a frame; returns (mask, dmin_obs). Pure with respect to the model."""
    mask, dmin_obs, _ = classify_with_descriptors(model, frame)
    return mask, dmin_obs


def subsense_feedback_update(
    model: SubsenseModel,
    frame: np.ndarray,
    raw_mask: np.ndarray,
    final_mask: np.ndarray,
    dmin_obs: np.ndarray,
    descriptors: Optional[np.ndarray] = None,
) -> None:
    """Adapt controllers and sample banks after a frame has been classified.

    ``raw_mask`` is the segmenter's own output (it drives label blinking);
    ``final_mask`` is the mask the caller settled on after any fusion stage
    and gates both the update-period controller and sample replacement.
    Callers that run no fusion pass the raw mask for both. Pixels whose final
    label is foreground never have their own bank touched, though a background
    neighbor may still diffuse a sample into them.
    """
    frame = np.ascontiguousarray(_check_frame(frame, model.shape))
    p = model.params
    h, w = model.shape
    raw = np.ascontiguousarray(raw_mask, dtype=np.uint8)
    final = np.ascontiguousarray(final_mask, dtype=np.uint8)
    if raw.shape != (h, w) or final.shape != (h, w):
        raise ValueError("mask shape does not match model")
    dmin_obs = np.ascontiguousarray(dmin_obs, dtype=np.float64)
    if descriptors is None:
        descriptors = compute_descriptors(frame, p.lbsp_rel_threshold)

    # Draw every random decision up front so RNG consumption per frame only
    # depends on the frame size, never on mask contents.
    u_self = model.rng.random((h, w))
    idx_self = model.rng.integers(0, p.num_samples, size=(h, w))
    u_diff = model.rng.random((h, w))
    nbr_choice = model.rng.integers(0, 8, size=(h, w))
    idx_diff = model.rng.integers(0, p.num_samples, size=(h, w))

    _kernels.subsense_feedback_kernel(
        frame, descriptors, model.bank_color, model.bank_desc,
        model.r, model.t, model.dmin, model.v, model.prev_raw,
        raw, final, dmin_obs,
        p.alpha, p.v_incr, p.v_decr, p.v_floor,
        p.r_lower, p.t_lower, p.t_upper, p.eps,
        u_self, idx_self, u_diff, nbr_choice, idx_diff,
    )
    model.prev_raw = raw.copy()
