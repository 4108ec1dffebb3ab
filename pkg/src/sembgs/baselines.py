"""Baseline background segmenters: sample-bank consensus and Gaussian mixtures.

Both expose the same split as the feedback segmenter (a pure classify step and
an update step taking an external mask) plus a one-shot step function that
classifies and updates in a single call, defaulting the update mask to the
segmenter's own output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import _kernels
from .subsense import _as_rng, _check_frame, apply_median


@dataclass
class VibeParams:
    num_samples: int = 20
    min_matches: int = 2
    radius: int = 20                # per-channel distance, L1 over 3 channels
    subsample: int = 16             # update probability is 1/subsample
    median_filter: bool = False
    median_size: int = 9

    def __post_init__(self):
        if self.num_samples < 1 or self.min_matches < 1:
            raise ValueError("num_samples and min_matches must be >= 1")
        if self.subsample < 1:
            raise ValueError("subsample must be >= 1")


@dataclass
class VibeModel:
    params: VibeParams
    bank_color: np.ndarray          # (H, W, N, 3) uint8
    rng: np.random.Generator = field(repr=False, default=None)

    @property
    def shape(self) -> tuple[int, int]:
        return self.bank_color.shape[0], self.bank_color.shape[1]


def vibe_init(
    frame: np.ndarray,
    params: Optional[VibeParams] = None,
    rng: Union[np.random.Generator, int, None] = None,
) -> VibeModel:
    """Fill each pixel's bank from its 8-neighborhood in the first frame."""
    params = params or VibeParams()
    rng = _as_rng(rng)
    frame = np.ascontiguousarray(_check_frame(frame))
    h, w = frame.shape[:2]
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]
    bank = np.empty((h, w, params.num_samples, 3), dtype=np.uint8)
    for k in range(params.num_samples):
        dy = rng.integers(-1, 2, size=(h, w))
        dx = rng.integers(-1, 2, size=(h, w))
        sy = np.clip(rows + dy, 0, h - 1)
        sx = np.clip(cols + dx, 0, w - 1)
        bank[:, :, k, :] = frame[sy, sx]
    return VibeModel(params=params, bank_color=bank, rng=rng)


def vibe_classify(model: VibeModel, frame: np.ndarray) -> np.ndarray:
    """Pure consensus classification against the sample bank."""
    frame = np.ascontiguousarray(_check_frame(frame, model.shape))
    p = model.params
    mask = np.empty(model.shape, dtype=np.uint8)
    _kernels.vibe_classify_kernel(frame, model.bank_color, p.radius, p.min_matches, mask)
    if p.median_filter:
        mask = apply_median(mask, p.median_size)
    return mask


def vibe_update(model: VibeModel, frame: np.ndarray, update_mask: np.ndarray) -> None:
    """Stochastically refresh banks where update_mask says background."""
    frame = np.ascontiguousarray(_check_frame(frame, model.shape))
    p = model.params
    h, w = model.shape
    final = np.ascontiguousarray(update_mask, dtype=np.uint8)
    if final.shape != (h, w):
        raise ValueError("mask shape does not match model")
    u_self = model.rng.random((h, w))
    idx_self = model.rng.integers(0, p.num_samples, size=(h, w))
    u_diff = model.rng.random((h, w))
    nbr_choice = model.rng.integers(0, 8, size=(h, w))
    idx_diff = model.rng.integers(0, p.num_samples, size=(h, w))
    _kernels.vibe_update_kernel(
        frame, model.bank_color, final, 1.0 / p.subsample,
        u_self, idx_self, u_diff, nbr_choice, idx_diff,
    )


def vibe_step(model: VibeModel, frame: np.ndarray,
              update_mask: Optional[np.ndarray] = None) -> np.ndarray:
    """Classify then update in one call. An all-foreground external mask
    therefore freezes every bank for that frame."""
    mask = vibe_classify(model, frame)
    vibe_update(model, frame, mask if update_mask is None else update_mask)
    return mask


@dataclass
class GmmParams:
    num_components: int = 5
    learning_rate: float = 0.01
    match_lambda: float = 2.5       # match gate in standard deviations
    bg_ratio: float = 0.7           # cumulative weight treated as background
    init_variance: float = 225.0
    min_variance: float = 4.0
    new_weight: float = 0.05
    median_filter: bool = False
    median_size: int = 9

    def __post_init__(self):
        if self.num_components < 1:
            raise ValueError("num_components must be >= 1")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must be in (0, 1]")
        if not 0.0 < self.bg_ratio <= 1.0:
            raise ValueError("bg_ratio must be in (0, 1]")


@dataclass
class GmmModel:
    params: GmmParams
    weights: np.ndarray             # (K, H, W) float64, sums to 1 over K
    means: np.ndarray               # (K, H, W, 3) float64
    variances: np.ndarray           # (K, H, W) float64

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape[1], self.weights.shape[2]


def gmm_init(frame: np.ndarray, params: Optional[GmmParams] = None) -> GmmModel:
    """Seed the first component with the frame; the rest start empty."""
    params = params or GmmParams()
    frame = _check_frame(frame)
    h, w = frame.shape[:2]
    k = params.num_components
    weights = np.zeros((k, h, w), dtype=np.float64)
    weights[0] = 1.0
    means = np.zeros((k, h, w, 3), dtype=np.float64)
    means[0] = frame.astype(np.float64)
    variances = np.full((k, h, w), params.init_variance, dtype=np.float64)
    return GmmModel(params=params, weights=weights, means=means, variances=variances)


def _gmm_match(model: GmmModel, frame: np.ndarray):
    """Squared distances, per-component match flags, and fitness ordering."""
    p = model.params
    diff = frame.astype(np.float64)[None, ...] - model.means
    d2 = np.einsum("khwc,khwc->khw", diff, diff)
    gate = (p.match_lambda ** 2) * 3.0 * model.variances
    matched = (d2 < gate) & (model.weights > 0.0)
    fitness = model.weights / np.sqrt(model.variances)
    order = np.argsort(-fitness, axis=0, kind="stable")
    return d2, matched, order


def _gmm_labels(model: GmmModel, matched: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Foreground decision given match flags and the fitness ordering."""
    p = model.params
    w_sorted = np.take_along_axis(model.weights, order, axis=0)
    m_sorted = np.take_along_axis(matched, order, axis=0)
    cumw = np.cumsum(w_sorted, axis=0)
    # Background components: ranks until the cumulative weight first exceeds
    # bg_ratio, that component included.
    below = np.concatenate(
        [np.zeros((1,) + cumw.shape[1:], dtype=bool), cumw[:-1] < p.bg_ratio], axis=0
    )
    is_bg_rank = np.zeros_like(m_sorted)
    is_bg_rank[0] = True
    is_bg_rank |= below
    any_match = m_sorted.any(axis=0)
    first_rank = np.argmax(m_sorted, axis=0)
    bg_hit = np.take_along_axis(is_bg_rank, first_rank[None], axis=0)[0]
    return np.where(any_match & bg_hit, 0, 1).astype(np.uint8)


def gmm_classify(model: GmmModel, frame: np.ndarray) -> np.ndarray:
    """Pure mixture classification; background iff the first matching
    component (by weight/sigma fitness) lies in the background set."""
    frame = _check_frame(frame, model.shape)
    _, matched, order = _gmm_match(model, frame)
    mask = _gmm_labels(model, matched, order)
    if model.params.median_filter:
        mask = apply_median(mask, model.params.median_size)
    return mask


def gmm_update(model: GmmModel, frame: np.ndarray, update_mask: np.ndarray) -> None:
    """Standard mixture update, applied only where update_mask says background."""
    frame = _check_frame(frame, model.shape)
    p = model.params
    h, w = model.shape
    final = np.asarray(update_mask, dtype=np.uint8)
    if final.shape != (h, w):
        raise ValueError("mask shape does not match model")
    allow = final == 0
    if not allow.any():
        return

    d2, matched, order = _gmm_match(model, frame)
    m_sorted = np.take_along_axis(matched, order, axis=0)
    any_match = m_sorted.any(axis=0)
    first_rank = np.argmax(m_sorted, axis=0)
    winner = np.take_along_axis(order, first_rank[None], axis=0)[0]  # (H, W)

    lr = p.learning_rate
    comp_idx = np.arange(p.num_components)[:, None, None]
    is_winner = (comp_idx == winner[None]) & any_match[None] & allow[None]

    # Matched pixels: decay all weights, bump the winner, adapt its stats.
    upd_px = any_match & allow
    model.weights[:, upd_px] *= 1.0 - lr
    model.weights[:, upd_px] += lr * is_winner[:, upd_px]
    rho = np.minimum(1.0, lr / np.maximum(model.weights, 1e-12))
    fframe = frame.astype(np.float64)
    diff = fframe[None, ...] - model.means
    model.means += np.where(is_winner[..., None], rho[..., None] * diff, 0.0)
    var_target = d2 / 3.0
    model.variances += np.where(is_winner, rho * (var_target - model.variances), 0.0)
    np.maximum(model.variances, p.min_variance, out=model.variances)

    # Unmatched pixels: replace the weakest component and renormalize.
    rep_px = (~any_match) & allow
    if rep_px.any():
        weakest = np.argmin(model.weights, axis=0)
        is_weak = (comp_idx == weakest[None]) & rep_px[None]
        model.weights[is_weak] = p.new_weight
        model.means[is_weak] = fframe[rep_px]
        model.variances[is_weak] = p.init_variance
        total = model.weights[:, rep_px].sum(axis=0)
        model.weights[:, rep_px] /= total


def gmm_step(model: GmmModel, frame: np.ndarray,
             update_mask: Optional[np.ndarray] = None) -> np.ndarray:
    """Classify then update in one call.

    Without an external mask the mixture adapts at every pixel, as the
    classic formulation does; passing a mask restricts adaptation to its
    background pixels (the feedback hook)."""
    mask = gmm_classify(model, frame)
    if update_mask is None:
        update_mask = np.zeros(model.shape, dtype=np.uint8)
    gmm_update(model, frame, update_mask)
    return mask
