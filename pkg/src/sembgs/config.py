"""Flat key/value run configuration files.

Grammar (one statement per line):

    key = value        # trailing comments allowed
    # full-line comment

Keys are identifiers. Values are double-quoted strings, booleans (true/false),
integers, floats, or bracketed integer lists like [12, 20, 39]. Unquoted
values without spaces are read as strings, which keeps paths convenient.
"""

from __future__ import annotations

import re
from dataclasses import fields
from typing import Any

from .errors import ConfigError
from .pipeline import PipelineConfig

_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

# Keys that map straight onto PipelineConfig fields.
_CONFIG_FIELDS = {f.name for f in fields(PipelineConfig)} - {"segmenter_params"}
# Keys consumed by the CLI rather than the pipeline.
_CLI_KEYS = {"out_dir"}
_PARAM_PREFIXES = ("subsense_", "vibe_", "gmm_")


def _parse_scalar(text: str, where: str) -> Any:
    text = text.strip()
    if not text:
        raise ConfigError(f"{where}: missing value")
    if text.startswith('"'):
        if not text.endswith('"') or len(text) < 2:
            raise ConfigError(f"{where}: unterminated string")
        return text[1:-1]
    if text == "true":
        return True
    if text == "false":
        return False
    if text.startswith("[") and text.endswith("]"):
        inner = text[1:-1].strip()
        if not inner:
            return []
        try:
            return [int(part.strip()) for part in inner.split(",")]
        except ValueError as exc:
            raise ConfigError(f"{where}: lists may only hold integers") from exc
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if " " in text or "\t" in text:
        raise ConfigError(f"{where}: unquoted value contains whitespace")
    return text


def _strip_comment(line: str) -> str:
    out = []
    in_string = False
    for ch in line:
        if ch == '"':
            in_string = not in_string
        if ch == "#" and not in_string:
            break
        out.append(ch)
    return "".join(out)


def parse_config_text(text: str) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line).strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(f"line {lineno}: invalid key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_scalar(value, f"line {lineno} ({key})")
    return values


def load_config_file(path: str) -> dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc


def build_pipeline_config(values: dict[str, Any]) -> tuple[PipelineConfig, dict[str, Any]]:
    """Split parsed keys into a PipelineConfig and the CLI-level extras."""
    plain: dict[str, Any] = {}
    params: dict[str, Any] = {}
    extras: dict[str, Any] = {}
    for key, value in values.items():
        if key in _CONFIG_FIELDS:
            plain[key] = value
        elif key in _CLI_KEYS:
            extras[key] = value
        elif key.startswith(_PARAM_PREFIXES):
            params[key] = value
        else:
            raise ConfigError(f"unknown config key {key!r}")
    if "input_dir" not in plain:
        raise ConfigError("config is missing required key 'input_dir'")
    config = PipelineConfig(segmenter_params=params, **plain)
    return config, extras
