"""Uniform two-phase interface over the background segmenters.

The pipeline needs a pure classification pass first and a model update after
fusion has produced the final mask, so every segmenter is wrapped as a pair
of methods:

* ``classify(frame) -> (mask, aux)`` with no model mutation
* ``update(frame, raw_mask, final_mask, aux) -> None``

``aux`` carries whatever classify already computed that update can reuse.
"""

from __future__ import annotations

import dataclasses
from typing import Any, Optional, Union

import numpy as np

from . import baselines, subsense

SEGMENTER_NAMES = ("subsense", "vibe", "gmm")


class SubsenseSegmenter:
    name = "subsense"

    def __init__(self, model: subsense.SubsenseModel):
        self.model = model

    @property
    def shape(self):
        return self.model.shape

    def classify(self, frame: np.ndarray):
        mask, dmin_obs, desc = subsense.classify_with_descriptors(self.model, frame)
        return mask, (dmin_obs, desc)

    def update(self, frame: np.ndarray, raw_mask: np.ndarray,
               final_mask: np.ndarray, aux: Any) -> None:
        dmin_obs, desc = aux
        subsense.subsense_feedback_update(
            self.model, frame, raw_mask, final_mask, dmin_obs, descriptors=desc
        )


class VibeSegmenter:
    name = "vibe"

    def __init__(self, model: baselines.VibeModel):
        self.model = model

    @property
    def shape(self):
        return self.model.shape

    def classify(self, frame: np.ndarray):
        return baselines.vibe_classify(self.model, frame), None

    def update(self, frame: np.ndarray, raw_mask: np.ndarray,
               final_mask: np.ndarray, aux: Any) -> None:
        baselines.vibe_update(self.model, frame, final_mask)


class GmmSegmenter:
    name = "gmm"

    def __init__(self, model: baselines.GmmModel):
        self.model = model

    @property
    def shape(self):
        return self.model.shape

    def classify(self, frame: np.ndarray):
        return baselines.gmm_classify(self.model, frame), None

    def update(self, frame: np.ndarray, raw_mask: np.ndarray,
               final_mask: np.ndarray, aux: Any) -> None:
        baselines.gmm_update(self.model, frame, final_mask)


def _build_params(cls, name: str, overrides: Optional[dict]):
    params = cls()
    if not overrides:
        return params
    fields = {f.name for f in dataclasses.fields(cls)}
    prefix = name + "_"
    picked = {}
    for key, value in overrides.items():
        if key.startswith(prefix) and key[len(prefix):] in fields:
            picked[key[len(prefix):]] = value
        elif key in fields:
            picked[key] = value
    return dataclasses.replace(params, **picked)


def create_segmenter(
    name: str,
    first_frames: list[np.ndarray],
    overrides: Optional[dict] = None,
    rng: Union[np.random.Generator, int, None] = None,
):
    """Build a segmenter from bootstrap frames.

    ``overrides`` holds flat parameter keys, optionally prefixed with the
    segmenter name (``subsense_num_samples``); unprefixed keys must name a
    parameter field directly (``median_filter``).
    """
    if not first_frames:
        raise ValueError("at least one bootstrap frame is required")
    if name == "subsense":
        params = _build_params(subsense.SubsenseParams, name, overrides)
        return SubsenseSegmenter(subsense.subsense_init(first_frames, params, rng))
    if name == "vibe":
        params = _build_params(baselines.VibeParams, name, overrides)
        return VibeSegmenter(baselines.vibe_init(first_frames[0], params, rng))
    if name == "gmm":
        params = _build_params(baselines.GmmParams, name, overrides)
        return GmmSegmenter(baselines.gmm_init(first_frames[0], params))
    raise ValueError(f"unknown segmenter {name!r}, expected one of {SEGMENTER_NAMES}")
