"""Exception types shared across the package."""


class FormatError(ValueError):
    """Raised when a file exists but its contents violate the expected format."""


class ConfigError(ValueError):
    """Raised when a run configuration is invalid or incomplete."""


class PipelineError(RuntimeError):
    """Raised when processing fails mid-stream; carries the offending frame index."""

    def __init__(self, message: str, frame_index: int):
        super().__init__(message)
        self.frame_index = frame_index


class EvaluationError(RuntimeError):
    """Raised when a results tree cannot be scored against its ground truth."""
