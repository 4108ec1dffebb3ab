"""Exception types for the exporter."""


class ConfigError(ValueError):
    """Raised when an export configuration is invalid or incomplete."""


class ExportError(RuntimeError):
    """Raised when a frame cannot be read or inference fails on it."""
