"""Semantic probability-map exporter for background-subtraction pipelines."""

from .classes import ADE20K_CLASS_NAMES, DEFAULT_FOREGROUND_NAMES, resolve_class_indices
from .errors import ConfigError, ExportError
from .exporter import ExporterConfig, collapse_scores, export_maps, list_frames, write_score_file
from .model import SegmentationModel

__all__ = [
    "ADE20K_CLASS_NAMES",
    "DEFAULT_FOREGROUND_NAMES",
    "resolve_class_indices",
    "ConfigError",
    "ExportError",
    "ExporterConfig",
    "collapse_scores",
    "export_maps",
    "list_frames",
    "write_score_file",
    "SegmentationModel",
]
