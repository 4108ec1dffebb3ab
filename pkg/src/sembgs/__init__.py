"""Background subtraction with semantic fusion feedback."""

from .baselines import (
    GmmModel, GmmParams, VibeModel, VibeParams,
    gmm_classify, gmm_init, gmm_step, gmm_update,
    vibe_classify, vibe_init, vibe_step, vibe_update,
)
from .errors import ConfigError, EvaluationError, FormatError, PipelineError
from .evaluation import ConfusionCounts, accumulate, aggregate, compute_metrics
from .fusion import DEFAULT_TAU_BG, DEFAULT_TAU_FG, fuse
from .pipeline import FrameResult, PipelineConfig, run_pipeline, run_reference
from .semantics import (
    DEFAULT_FOREGROUND_CLASS_INDICES, DEFAULT_FOREGROUND_CLASS_NAMES, DEFAULT_PHI,
    SemanticModel, foreground_probability, semantic_model_init,
    semantic_model_update, split_semantics,
)
from .subsense import (
    SubsenseModel, SubsenseParams,
    subsense_classify, subsense_feedback_update, subsense_init,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ConfusionCounts", "DEFAULT_FOREGROUND_CLASS_INDICES",
    "DEFAULT_FOREGROUND_CLASS_NAMES", "DEFAULT_PHI", "DEFAULT_TAU_BG",
    "DEFAULT_TAU_FG", "EvaluationError", "FormatError", "FrameResult",
    "GmmModel", "GmmParams", "PipelineConfig", "PipelineError", "SemanticModel",
    "SubsenseModel", "SubsenseParams", "VibeModel", "VibeParams", "accumulate",
    "aggregate", "compute_metrics", "foreground_probability", "fuse",
    "gmm_classify", "gmm_init", "gmm_step", "gmm_update", "run_pipeline",
    "run_reference", "semantic_model_init", "semantic_model_update",
    "split_semantics", "subsense_classify", "subsense_feedback_update",
    "subsense_init", "vibe_classify", "vibe_init", "vibe_step", "vibe_update",
]
