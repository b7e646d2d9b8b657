"""Pipeline configuration: defaults, config file, environment, flags.

Precedence (lowest to highest): built-in defaults, `--config` file,
`HERDPIPE_*` environment variables, command-line flags. The config file
is a plain key=value format (a TOML-compatible subset: full-line `#`
comments, optional quotes around values); unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

from .classify import ForestConfig
from .errors import ConfigError
from .estrus import LstmConfig
from .features import FeatureConfig, ParamMode

ENV_PREFIX = "HERDPIPE_"

MODES = tuple(m.value for m in ParamMode)


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable of the pipeline, with documented defaults.

    ``stride`` defaults to 10 at the pipeline level (non-overlapping
    windows keep multi-day runs tractable); the rolling_windows operation
    itself defaults to stride 1. ``features_per_split`` 0 means
    floor(sqrt(n_features)); ``class_weight`` "none" disables reweighting.
    """

    mode: str = "stats24"
    window_size: int = 10
    stride: int = 10
    fft_block: int = 64
    n_bands: int = 3
    train_frac: float = 0.7
    n_trees: int = 100
    max_depth: int = 16
    min_samples_leaf: int = 5
    features_per_split: int = 0
    bootstrap: bool = True
    class_weight: str = "none"
    hidden_size: int = 32
    epochs: int = 2000
    learning_rate: float = 1e-3
    clip_norm: float = 5.0
    plateau_patience: int = 60
    plateau_rel_tol: float = 1e-5
    lookback: int = 72
    quantile: float = 0.99
    min_anomaly_hours: int = 3
    delta_threshold: float = 0.4
    val_frac: float = 0.2
    boost: float = 2.0
    seed: int = 0
    tz_offset: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}")
        if self.class_weight not in ("none", "balanced"):
            raise ConfigError("class_weight must be 'none' or 'balanced'")
        positive = (
            "window_size", "stride", "fft_block", "n_bands", "n_trees",
            "min_samples_leaf", "hidden_size", "epochs", "plateau_patience",
            "lookback", "min_anomaly_hours",
        )
        for name in positive:
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not (0.0 < self.train_frac < 1.0):
            raise ConfigError("train_frac must be in (0, 1)")
        if not (0.0 < self.val_frac < 1.0):
            raise ConfigError("val_frac must be in (0, 1)")
        if not (0.0 <= self.quantile <= 1.0):
            raise ConfigError("quantile must be in [0, 1]")
        if self.boost < 1.0:
            raise ConfigError("boost must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        if self.max_depth < 0 or self.features_per_split < 0:
            raise ConfigError("max_depth and features_per_split must be >= 0")
        if self.learning_rate <= 0 or self.clip_norm <= 0 or self.plateau_rel_tol <= 0:
            raise ConfigError("learning_rate, clip_norm, plateau_rel_tol must be > 0")

    def feature_config(self) -> FeatureConfig:
        return FeatureConfig(
            window_size=self.window_size,
            stride=self.stride,
            fft_block=self.fft_block,
            n_bands=self.n_bands,
        )

    def param_mode(self) -> ParamMode:
        return ParamMode(self.mode)

    def forest_config(self) -> ForestConfig:
        return ForestConfig(
            n_trees=self.n_trees,
            max_depth=self.max_depth,
            min_samples_leaf=self.min_samples_leaf,
            features_per_split=self.features_per_split or None,
            bootstrap=self.bootstrap,
            class_weight=None if self.class_weight == "none" else self.class_weight,
        )

    def lstm_config(self) -> LstmConfig:
        return LstmConfig(
            hidden_size=self.hidden_size,
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            clip_norm=self.clip_norm,
            seed=self.seed,
            plateau_patience=self.plateau_patience,
            plateau_rel_tol=self.plateau_rel_tol,
        )


_FIELDS = {f.name: f for f in dataclasses.fields(PipelineConfig)}


def _coerce(name: str, text: str):
    kind = _FIELDS[name].type
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        text = text[1:-1]
    try:
        if kind == "bool":
            lowered = text.lower()
            if lowered in ("true", "1", "yes"):
                return True
            if lowered in ("false", "0", "no"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {exc}") from None


def load_config_file(path) -> dict[str, str]:
    """key=value lines; full-line # comments; unknown keys rejected."""
    values: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, text = line.split("=", 1)
                key = key.strip()
                if key not in _FIELDS:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = text.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    return values


def env_overrides() -> dict[str, str]:
    found = {}
    for name in _FIELDS:
        value = os.environ.get(ENV_PREFIX + name.upper())
        if value is not None:
            found[name] = value
    return found


def resolve_config(config_path=None, flag_values: dict | None = None) -> PipelineConfig:
    """Merge defaults < config file < environment < flags."""
    merged: dict = {}
    if config_path is not None:
        merged.update(load_config_file(config_path))
    merged.update(env_overrides())
    typed = {name: _coerce(name, text) for name, text in merged.items()}
    for name, value in (flag_values or {}).items():
        if value is not None:
            if name not in _FIELDS:
                raise ConfigError(f"unknown config field {name!r}")
            typed[name] = value
    return PipelineConfig(**typed)
