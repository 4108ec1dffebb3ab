"""Semantic foreground evidence: probability maps and the slow background model.

A semantic map stores, per pixel, 255 times the summed softmax probability of
the foreground-relevant classes. The semantic background model M is a map of
the same kind, frozen under foreground and refreshed under background with a
small probability, so it follows the scene on a budget of roughly one update
per phi background observations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

# Class names whose probability counts as foreground evidence, and their
# indices in the default 150-class scene-parsing label list.
DEFAULT_FOREGROUND_CLASS_NAMES = (
    "person", "car", "cushion", "box", "book", "boat",
    "bus", "truck", "bottle", "van", "bag", "bicycle",
)
DEFAULT_FOREGROUND_CLASS_INDICES = (12, 20, 39, 41, 67, 76, 80, 83, 98, 102, 115, 127)

DEFAULT_PHI = 100


def foreground_probability(scores: np.ndarray, fg_classes: Iterable[int]) -> np.ndarray:
    """Collapse per-class scores to an 8-bit foreground evidence map.

    ``scores`` is (H, W, C) raw (pre-softmax) values. The result is
    round-half-up of 255 times the softmax mass of ``fg_classes``.
    """
    scores = np.asarray(scores)
    if scores.ndim != 3:
        raise ValueError("scores must be an (H, W, C) array")
    if not np.isfinite(scores).all():
        raise ValueError("scores contain non-finite values")
    fg = np.asarray(sorted(set(int(c) for c in fg_classes)), dtype=np.int64)
    if fg.size == 0:
        raise ValueError("at least one foreground class index is required")
    c = scores.shape[2]
    if fg.min() < 0 or fg.max() >= c:
        raise ValueError(f"foreground class index out of range for {c} classes")
    s = scores.astype(np.float64)
    s -= s.max(axis=2, keepdims=True)
    e = np.exp(s)
    prob = e[..., fg].sum(axis=2) / e.sum(axis=2)
    out = np.floor(255.0 * prob + 0.5)
    return np.clip(out, 0, 255).astype(np.uint8)


@dataclass
class SemanticModel:
    m: np.ndarray                   # (H, W) uint8
    phi: int = DEFAULT_PHI
    rng: np.random.Generator = field(repr=False, default=None)

    @property
    def shape(self) -> tuple[int, int]:
        return self.m.shape


def semantic_model_init(
    first_map: np.ndarray,
    phi: int = DEFAULT_PHI,
    rng: Union[np.random.Generator, int, None] = None,
) -> SemanticModel:
    """Start the model as a byte copy of the first semantic map."""
    first_map = np.asarray(first_map)
    if first_map.ndim != 2 or first_map.dtype != np.uint8:
        raise ValueError("semantic map must be an (H, W) uint8 array")
    phi = int(phi)
    if phi < 1:
        raise ValueError("phi must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return SemanticModel(m=first_map.copy(), phi=phi, rng=rng)


def _check_map(sem: np.ndarray, shape) -> np.ndarray:
    sem = np.asarray(sem)
    if sem.ndim != 2 or sem.dtype != np.uint8:
        raise ValueError("semantic map must be an (H, W) uint8 array")
    if sem.shape != shape:
        raise ValueError(f"semantic map shape {sem.shape} does not match model {shape}")
    return sem


def split_semantics(sem: np.ndarray, model: SemanticModel):
    """Return (s_bg, s_fg) for a frame's semantic map.

    s_bg is the map itself; s_fg is the signed difference map minus model,
    kept unsaturated in int16 so strong evidence over a high model value
    still reads as zero or negative.
    """
    sem = _check_map(sem, model.shape)
    s_bg = sem.copy()
    s_fg = sem.astype(np.int16) - model.m.astype(np.int16)
    return s_bg, s_fg


def semantic_model_update(model: SemanticModel, sem: np.ndarray,
                          final_mask: np.ndarray) -> None:
    """Refresh M where the final mask says background, each pixel with
    probability 1/phi; foreground pixels are left untouched."""
    sem = _check_map(sem, model.shape)
    final = np.asarray(final_mask, dtype=np.uint8)
    if final.shape != model.shape:
        raise ValueError("mask shape does not match model")
    u = model.rng.random(model.shape)
    sel = (final == 0) & (u < 1.0 / model.phi)
    model.m[sel] = sem[sel]
