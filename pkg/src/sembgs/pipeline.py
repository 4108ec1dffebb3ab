"""Frame processing: a two-worker parallel pipeline and its sequential twin.

Per frame, a background-subtraction worker classifies the frame while a
semantic worker produces the frame's evidence maps; a coordinator fuses the
two masks and hands the fused result back to both workers so they can adapt
their models. The semantic worker only loads a fresh map every
``semantic_period`` frames and reuses the previous one in between.

``run_reference`` performs the same steps one after another in a single
thread. Both entry points consume their random streams in the same order, so
for a given config and seed they emit bit-identical mask streams.
"""

from __future__ import annotations

import os
import queue
import threading
import time
from dataclasses import dataclass, field, replace
from typing import Any, Iterator, Optional, Sequence

import numpy as np

from . import frame_io, fusion, semantics
from .errors import ConfigError, PipelineError
from .segmenters import SEGMENTER_NAMES, create_segmenter

SEMANTIC_MODES = ("none", "maps", "scores")


@dataclass
class PipelineConfig:
    input_dir: str
    pattern: str = "in%06d.jpg"
    frame_start: int = 1
    frame_end: Optional[int] = None
    segmenter: str = "subsense"
    segmenter_params: dict = field(default_factory=dict)
    semantic_mode: str = "none"
    semantic_dir: Optional[str] = None
    semantic_pattern: Optional[str] = None      # defaults by mode
    semantic_period: int = 1
    fg_classes: Sequence[int] = semantics.DEFAULT_FOREGROUND_CLASS_INDICES
    tau_bg: int = fusion.DEFAULT_TAU_BG
    tau_fg: int = fusion.DEFAULT_TAU_FG
    phi: int = semantics.DEFAULT_PHI
    update_model_on_reused: bool = True
    seed: Optional[int] = None

    def resolved_semantic_pattern(self) -> str:
        if self.semantic_pattern:
            return self.semantic_pattern
        return "sem%06d.bin" if self.semantic_mode == "scores" else "sem%06d.png"

    def validate(self) -> None:
        if self.segmenter not in SEGMENTER_NAMES:
            raise ConfigError(f"unknown segmenter {self.segmenter!r}")
        if self.semantic_mode not in SEMANTIC_MODES:
            raise ConfigError(f"unknown semantic mode {self.semantic_mode!r}")
        if self.semantic_period < 1:
            raise ConfigError("semantic period must be >= 1")
        if self.semantic_mode != "none" and not self.semantic_dir:
            raise ConfigError("semantic_dir is required unless semantic mode is none")
        if not -1 <= int(self.tau_bg) <= 255:
            raise ConfigError("tau_bg must be in [-1, 255]")
        if not 0 <= int(self.tau_fg) <= 256:
            raise ConfigError("tau_fg must be in [0, 256]")
        if int(self.phi) < 1:
            raise ConfigError("phi must be >= 1")
        if self.frame_end is not None and self.frame_end < self.frame_start:
            raise ConfigError("frame_end must be >= frame_start")


@dataclass
class FrameResult:
    index: int                      # frame index as named on disk
    position: int                   # 0-based position within the processed range
    raw_mask: np.ndarray            # segmenter output B_t
    final_mask: np.ndarray          # fused output D_t
    sem_index: Optional[int]        # index of the semantic map in effect
    bgs_ms: float
    sem_ms: float
    fuse_ms: float


def _load_semantic(config: PipelineConfig, index: int, shape) -> np.ndarray:
    path = os.path.join(config.semantic_dir, config.resolved_semantic_pattern() % index)
    if config.semantic_mode == "scores":
        scores = frame_io.read_scores(path)
        sem = semantics.foreground_probability(scores, config.fg_classes)
    else:
        sem = frame_io.load_semantic_map(path)
    if sem.shape != shape:
        raise frame_io.FormatError(
            f"semantic map {path} has shape {sem.shape}, frames are {shape}"
        )
    return sem


class _Prepared:
    def __init__(self, config: PipelineConfig):
        config.validate()
        self.config = config
        self.indices = frame_io.sequence_indices(
            config.input_dir, config.pattern, config.frame_start, config.frame_end
        )
        self.segmenter = None
        self.sem_model = None
        self.first_sem = None
        if not self.indices:
            return

        seq = np.random.SeedSequence(config.seed)
        bgs_seed, sem_seed = seq.spawn(2)
        first_frame = frame_io.load_frame(
            os.path.join(config.input_dir, config.pattern % self.indices[0])
        )
        self.shape = first_frame.shape[:2]
        self.segmenter = create_segmenter(
            config.segmenter, [first_frame], config.segmenter_params,
            np.random.default_rng(bgs_seed),
        )

        if config.semantic_mode != "none":
            pattern = config.resolved_semantic_pattern()
            missing = []
            for pos in range(0, len(self.indices), config.semantic_period):
                path = os.path.join(config.semantic_dir, pattern % self.indices[pos])
                if not os.path.exists(path):
                    missing.append(path)
            if missing:
                raise ConfigError(
                    f"{len(missing)} semantic file(s) missing, first: {missing[0]}"
                )
            self.first_sem = _load_semantic(config, self.indices[0], self.shape)
            self.sem_model = semantics.semantic_model_init(
                self.first_sem, config.phi, np.random.default_rng(sem_seed)
            )

    def frame_path(self, index: int) -> str:
        return os.path.join(self.config.input_dir, self.config.pattern % index)


class _SemanticState:
    """Owns the semantic model and the currently loaded map."""

    def __init__(self, prep: _Prepared):
        self.config = prep.config
        self.model = prep.sem_model
        self.shape = prep.shape
        self.current = prep.first_sem
        self.current_index = prep.indices[0]

    def prepare(self, position: int, index: int):
        start = time.perf_counter()
        fresh = position % self.config.semantic_period == 0
        if fresh and position != 0:
            self.current = _load_semantic(self.config, index, self.shape)
            self.current_index = index
        self.fresh = fresh
        s_bg, s_fg = semantics.split_semantics(self.current, self.model)
        ms = (time.perf_counter() - start) * 1000.0
        return s_bg, s_fg, self.current_index, ms

    def update(self, final_mask: np.ndarray) -> None:
        if self.fresh or self.config.update_model_on_reused:
            semantics.semantic_model_update(self.model, self.current, final_mask)


def run_reference(config: PipelineConfig) -> Iterator[FrameResult]:
    """Sequential twin of run_pipeline: identical per-frame math, no threads.

    Configuration problems (including missing semantic files) raise before
    any frame is processed.
    """
    prep = _Prepared(config)
    return _reference_frames(prep)


def _reference_frames(prep: _Prepared) -> Iterator[FrameResult]:
    if not prep.indices:
        return
    config = prep.config
    seg = prep.segmenter
    sem_state = _SemanticState(prep) if config.semantic_mode != "none" else None

    for position, index in enumerate(prep.indices):
        frame = _read_frame(prep, index)
        start = time.perf_counter()
        raw, aux = seg.classify(frame)
        bgs_ms = (time.perf_counter() - start) * 1000.0

        sem_ms = 0.0
        fuse_ms = 0.0
        sem_index = None
        if sem_state is not None:
            try:
                s_bg, s_fg, sem_index, sem_ms = sem_state.prepare(position, index)
            except (OSError, ValueError) as exc:
                raise PipelineError(f"frame {index}: {exc}", index) from exc
            start = time.perf_counter()
            final = fusion.fuse(raw, s_bg, s_fg, config.tau_bg, config.tau_fg)
            fuse_ms = (time.perf_counter() - start) * 1000.0
        else:
            final = raw

        seg.update(frame, raw, final, aux)
        if sem_state is not None:
            sem_state.update(final)
        yield FrameResult(index, position, raw, final, sem_index, bgs_ms, sem_ms, fuse_ms)


def _read_frame(prep: _Prepared, index: int) -> np.ndarray:
    try:
        frame = frame_io.load_frame(prep.frame_path(index))
    except OSError as exc:
        raise PipelineError(f"frame {index}: {exc}", index) from exc
    if frame.shape[:2] != prep.shape:
        raise PipelineError(
            f"frame {index}: shape {frame.shape[:2]} does not match {prep.shape}", index
        )
    return frame


class _Worker(threading.Thread):
    """Generic request/reply worker; one request in flight at a time."""

    def __init__(self, name: str, handler):
        super().__init__(name=name, daemon=True)
        self.handler = handler
        self.inbox: queue.Queue = queue.Queue(maxsize=1)
        self.outbox: queue.Queue = queue.Queue(maxsize=1)

    def run(self):
        while True:
            item = self.inbox.get()
            if item is None:
                return
            try:
                self.outbox.put(("ok", self.handler(*item)))
            except BaseException as exc:  # propagated by the coordinator
                self.outbox.put(("error", exc))

    def submit(self, *item):
        self.inbox.put(item)

    def collect(self):
        status, payload = self.outbox.get()
        if status == "error":
            raise payload
        return payload

    def stop(self):
        # The protocol is strict request/reply, so the worker is never blocked
        # publishing; draining the inbox guarantees the sentinel fits.
        while True:
            try:
                self.inbox.put_nowait(None)
                break
            except queue.Full:
                try:
                    self.inbox.get_nowait()
                except queue.Empty:
                    pass
        self.join(timeout=10.0)


def run_pipeline(config: PipelineConfig) -> Iterator[FrameResult]:
    """Two-worker pipeline; emits the same stream as run_reference.

    Configuration problems (including missing semantic files) raise before
    any frame is processed.
    """
    prep = _Prepared(config)
    return _pipeline_frames(prep)


def _pipeline_frames(prep: _Prepared) -> Iterator[FrameResult]:
    if not prep.indices:
        return
    config = prep.config
    seg = prep.segmenter
    sem_state = _SemanticState(prep) if config.semantic_mode != "none" else None

    def bgs_handler(op, *args):
        if op == "classify":
            (frame,) = args
            start = time.perf_counter()
            raw, aux = seg.classify(frame)
            return raw, aux, (time.perf_counter() - start) * 1000.0
        frame, raw, final, aux = args
        seg.update(frame, raw, final, aux)
        return None

    def sem_handler(op, *args):
        if op == "prepare":
            return sem_state.prepare(*args)
        (final,) = args
        sem_state.update(final)
        return None

    bgs_worker = _Worker("bgs-worker", bgs_handler)
    bgs_worker.start()
    sem_worker = None
    if sem_state is not None:
        sem_worker = _Worker("sem-worker", sem_handler)
        sem_worker.start()

    try:
        for position, index in enumerate(prep.indices):
            frame = _read_frame(prep, index)
            bgs_worker.submit("classify", frame)
            if sem_worker is not None:
                sem_worker.submit("prepare", position, index)

            raw, aux, bgs_ms = bgs_worker.collect()
            sem_ms = 0.0
            fuse_ms = 0.0
            sem_index = None
            if sem_worker is not None:
                try:
                    s_bg, s_fg, sem_index, sem_ms = sem_worker.collect()
                except (OSError, ValueError) as exc:
                    raise PipelineError(f"frame {index}: {exc}", index) from exc
                start = time.perf_counter()
                final = fusion.fuse(raw, s_bg, s_fg, config.tau_bg, config.tau_fg)
                fuse_ms = (time.perf_counter() - start) * 1000.0
            else:
                final = raw

            bgs_worker.submit("update", frame, raw, final, aux)
            if sem_worker is not None:
                sem_worker.submit("update", final)
            bgs_worker.collect()
            if sem_worker is not None:
                sem_worker.collect()

            yield FrameResult(index, position, raw, final, sem_index,
                              bgs_ms, sem_ms, fuse_ms)
    finally:
        bgs_worker.stop()
        if sem_worker is not None:
            sem_worker.stop()


def passthrough_config(config: PipelineConfig) -> PipelineConfig:
    """A copy of config with both fusion rules disabled."""
    return replace(config, tau_bg=-1, tau_fg=256)
