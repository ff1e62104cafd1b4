"""
Run configuration - quadrature overrides, output format and worker count,
read from an optional config file and overridden by command-line flags.

The config file is a flat YAML mapping, one ``key: value`` per line; lines
written as ``key = value`` are accepted too.
"""

import os
import re
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from .errors import ConfigError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig

logger = logging.getLogger(__name__)

QUADRATURE_KEYS = ("rel_tol", "abs_tol", "max_subdivisions", "eta_transform", "u_transform",
                   "regulator_sequence", "extrapolation_order")
RUN_KEYS = ("format", "threads", "progress")
OUTPUT_FORMATS = ("csv", "json")

_ASSIGNMENT = re.compile(r"^(\s*[A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*)$")


@dataclass(frozen=True)
class RunConfig:
    quadrature: QuadratureConfig = field(default_factory=lambda: DEFAULT_CONFIG)
    format: str = "csv"
    threads: Union[int, str] = 1
    progress: bool = True

    def __post_init__(self):
        if self.format not in OUTPUT_FORMATS:
            raise ConfigError(f"format must be one of {OUTPUT_FORMATS}, got {self.format!r}")
        if self.threads != "auto" and not (isinstance(self.threads, int) and self.threads >= 1):
            raise ConfigError(f"threads must be a positive integer or 'auto', got {self.threads!r}")

    @property
    def workers(self) -> int:
        if self.threads == "auto":
            return os.cpu_count() or 1
        return int(self.threads)

    def as_dict(self) -> Dict[str, Any]:
        return {"quadrature": self.quadrature.as_dict(), "format": self.format,
                "threads": self.threads, "progress": self.progress}


def _normalize(text: str) -> str:
    lines = []
    for line in text.splitlines():
        stripped = line.split("#", 1)[0]
        match = _ASSIGNMENT.match(stripped)
        lines.append(f"{match.group(1)}: {match.group(2)}" if match and ":" not in stripped else line)
    return "\n".join(lines)


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Parse a config file into a flat dict of known keys."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(_normalize(path.read_text(encoding="utf-8"))) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold key/value lines")
    unknown = set(data) - set(QUADRATURE_KEYS) - set(RUN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {', '.join(sorted(unknown))}")
    logger.debug(f"config file {path}: {data}")
    return data


def _coerce_threads(value: Any) -> Union[int, str]:
    if value == "auto":
        return "auto"
    if value is None:
        return 1
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"threads must be an integer or 'auto', got {value!r}") from None


def build_run_config(file_values: Optional[Dict[str, Any]] = None,
                     overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Merge file values with flag overrides (flags win) and validate."""
    merged: Dict[str, Any] = dict(file_values or {})
    merged.update({key: value for key, value in (overrides or {}).items() if value is not None})

    quad_values = {key: merged[key] for key in QUADRATURE_KEYS if key in merged}
    try:
        for key in ("rel_tol", "abs_tol"):
            if key in quad_values:
                quad_values[key] = float(quad_values[key])
        for key in ("max_subdivisions", "extrapolation_order"):
            if key in quad_values:
                quad_values[key] = int(quad_values[key])
        if "regulator_sequence" in quad_values:
            seq = quad_values["regulator_sequence"]
            if isinstance(seq, str):
                seq = [s for s in re.split(r"[,\s]+", seq.strip("[] ")) if s]
            quad_values["regulator_sequence"] = tuple(float(d) for d in seq)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid quadrature setting: {exc}") from None

    return RunConfig(
        quadrature=DEFAULT_CONFIG.with_overrides(**quad_values),
        format=str(merged.get("format", "csv")).lower(),
        threads=_coerce_threads(merged.get("threads", 1)),
        progress=bool(merged.get("progress", True)),
    )
