"""Application configuration: a flat key-value document mirroring CLI flags."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError
from .rsa_core import Mode, RsaConfig
from .semantics import ThresholdTable

__all__ = ["AppConfig", "CONFIG_KEYS", "load_config_file"]

# config-file key -> AppConfig attribute
CONFIG_KEYS = {
    "theta.type": "theta_type",
    "theta.attr": "theta_attr",
    "theta.rel": "theta_rel",
    "alpha": "alpha",
    "max_len": "max_len",
    "entropy_stop": "entropy_stop",
    "beta": "beta",
    "mode": "mode",
    "seed": "seed",
    "lm": "lm",
    "lm_weight": "lm_weight",
    "overlap": "overlap",
    "output": "output",
    "verbosity": "verbosity",
}


@dataclass
class AppConfig:
    theta_type: float = 0.3
    theta_attr: float = 0.3
    theta_rel: float = 0.5
    alpha: float = 1.0
    max_len: int = 4
    entropy_stop: float = 0.1
    beta: float = 0.0
    mode: str = "greedy"
    seed: int = 0
    lm: str | None = None
    lm_weight: bool = True
    overlap: str = "coverage"
    output: str | None = None
    verbosity: str = "warning"

    @classmethod
    def build(cls, file_values: Mapping[str, Any] | None = None, overrides: Mapping[str, Any] | None = None) -> "AppConfig":
        """Merge file values with flag overrides (flags win) and validate."""
        cfg = cls()
        for key, value in (file_values or {}).items():
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, CONFIG_KEYS[key], value)
        for attr, value in (overrides or {}).items():
            if value is not None:
                setattr(cfg, attr, value)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        try:
            self.thresholds()
            self.rsa()
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from None
        if self.overlap not in ("coverage", "iou"):
            raise ConfigError(f"overlap must be 'coverage' or 'iou', got {self.overlap!r}")
        if not isinstance(self.lm_weight, bool):
            raise ConfigError("lm_weight must be a boolean")

    def thresholds(self) -> ThresholdTable:
        return ThresholdTable(float(self.theta_type), float(self.theta_attr), float(self.theta_rel))

    def rsa(self) -> RsaConfig:
        if not isinstance(self.max_len, int) or isinstance(self.max_len, bool):
            raise ConfigError("max_len must be an integer")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        return RsaConfig(
            alpha=float(self.alpha),
            max_len=self.max_len,
            entropy_stop=float(self.entropy_stop),
            beta=float(self.beta),
            mode=Mode(self.mode),
            seed=self.seed,
            lm_weight=self.lm_weight,
        )


def load_config_file(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config file must be a flat JSON object")
    for k, v in doc.items():
        if isinstance(v, (dict, list)):
            raise ConfigError(f"config key {k!r} must be a scalar")
    return doc
