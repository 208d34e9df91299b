"""Experiment configuration: defaults, validation and (de)serialisation."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml


class ConfigError(ValueError):
    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


NOISE_MODELS = ("exact", "events", "delta_w")
METHODS = ("self", "holo")


@dataclass
class ExperimentConfig:
    K: float = 14.0
    kbar: float = 15.0
    sigma: float = 0.1
    num_points: int = 4096
    rho_max: float = 64.0
    kicks: list | None = None
    method: str = "holo"
    noise: str = "events"
    events: int = 1_000_000
    delta_w: float = 0.0
    realizations: int = 25
    master_seed: int = 1234
    epsilon_peak: float = 1e-12
    tau_floor: float = 1e-3
    accuracy: list = field(default_factory=lambda: [10.0, 30.0, 100.0, 300.0, 1000.0])
    output_dir: str = "out"

    def __post_init__(self):
        self._coerce()
        self.validate()

    def _coerce(self):
        # PyYAML reads "1e-12" as a string
        for key in ("K", "kbar", "sigma", "rho_max", "delta_w", "epsilon_peak", "tau_floor"):
            v = getattr(self, key)
            if isinstance(v, str) or isinstance(v, bool):
                try:
                    setattr(self, key, float(v))
                except ValueError:
                    raise ConfigError(key, f"not a number: {v!r}") from None
            elif not isinstance(v, (int, float)):
                raise ConfigError(key, f"not a number: {v!r}")
        if isinstance(self.accuracy, list):
            try:
                self.accuracy = [float(a) for a in self.accuracy]
            except (TypeError, ValueError):
                raise ConfigError("accuracy", "entries must be numbers") from None

    def validate(self):
        for key in ("kbar", "sigma", "rho_max", "tau_floor"):
            if not float(getattr(self, key)) > 0:
                raise ConfigError(key, f"must be positive, got {getattr(self, key)!r}")
        if float(self.K) < 0:
            raise ConfigError("K", f"must be >= 0, got {self.K!r}")
        for key in ("num_points", "events", "realizations"):
            v = getattr(self, key)
            if isinstance(v, bool) or int(v) != v or int(v) <= 0:
                raise ConfigError(key, f"must be a positive integer, got {v!r}")
        if self.epsilon_peak < 0:
            raise ConfigError("epsilon_peak", "must be >= 0")
        if self.delta_w < 0:
            raise ConfigError("delta_w", "must be >= 0")
        if int(self.master_seed) != self.master_seed or self.master_seed < 0:
            raise ConfigError("master_seed", "must be a non-negative integer")
        if self.method not in METHODS:
            raise ConfigError("method", f"must be one of {METHODS}, got {self.method!r}")
        if self.noise not in NOISE_MODELS:
            raise ConfigError("noise", f"must be one of {NOISE_MODELS}, got {self.noise!r}")
        if self.kicks is not None:
            if not isinstance(self.kicks, list) or any(
                    isinstance(k, bool) or int(k) != k or k < 0 for k in self.kicks):
                raise ConfigError("kicks", "must be a list of non-negative integers")
        if not isinstance(self.accuracy, list) or not self.accuracy or any(
                not float(a) > 0 for a in self.accuracy):
            raise ConfigError("accuracy", "must be a nonempty list of positive numbers")

    def to_dict(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def config_from_dict(data: dict) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(unknown[0], "unknown configuration key")
    return ExperimentConfig(**data)


def parse_config(path) -> ExperimentConfig:
    """Read a YAML or JSON mapping of config keys; missing keys take defaults."""
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"cannot parse {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("<file>", "top level must be a mapping")
    return config_from_dict(data)
