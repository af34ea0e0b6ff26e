"""Runtime configuration: every tunable threshold in one flat record.

The file format is plain `key = value` text, one setting per line, with
# comments. Unknown keys are errors so typos cannot silently fall back
to defaults.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

from .audio import FrameSpec
from .errors import ConfigError
from .features import FeatureConfig


@dataclass
class Config:
    frame_len: float = 0.020
    hop: float = 0.010
    nfft: int = 512
    n_mels: int = 26
    n_ceps: int = 13
    sf_threshold: float = 0.75
    break_short_ms: float = 80.0
    break_long_ms: float = 290.0
    flat_max_hz: float = 10.0
    small_max_hz: float = 60.0
    medium_max_hz: float = 100.0
    chord_tolerance: float = 0.15
    endpoint_tolerance: float = 0.2
    f0_min: float = 50.0
    f0_max: float = 500.0
    lpc_order: int = 13
    smoothing_epsilon: float = 1e-4
    iterations: int = 5
    var_floor: float = 1e-6
    workers: int = 4

    def frame_spec(self) -> FrameSpec:
        return FrameSpec(frame_len=self.frame_len, hop=self.hop, nfft=self.nfft)

    def feature_config(self, sample_rate: int) -> FeatureConfig:
        return FeatureConfig(
            frame=self.frame_spec(),
            sample_rate=sample_rate,
            n_mels=self.n_mels,
            n_ceps=self.n_ceps,
        )

    def contour_thresholds(self) -> dict:
        return {
            "flat_max_hz": self.flat_max_hz,
            "small_max_hz": self.small_max_hz,
            "medium_max_hz": self.medium_max_hz,
            "chord_tolerance": self.chord_tolerance,
            "endpoint_tolerance": self.endpoint_tolerance,
        }


_FIELD_TYPES = {f.name: f.type for f in fields(Config)}


def _parse_value(name: str, text: str, lineno: int, path):
    kind = _FIELD_TYPES[name]
    try:
        if kind in ("int", int):
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError("%s:%d: bad value %r for %s" % (path, lineno, text, name))


def load_config(path: str | os.PathLike) -> Config:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc)) from exc

    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("%s:%d: expected key = value, got %r" % (path, lineno, raw))
        name, _, text = line.partition("=")
        name = name.strip()
        if name not in _FIELD_TYPES:
            raise ConfigError("%s:%d: unknown setting %r" % (path, lineno, name))
        values[name] = _parse_value(name, text.strip(), lineno, path)
    return Config(**values)


def save_config(config: Config, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for f in fields(Config):
            fh.write("%s = %r\n" % (f.name, getattr(config, f.name)))
