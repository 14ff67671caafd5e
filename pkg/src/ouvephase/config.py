"""Flat ``key=value`` run configuration shared by all CLI commands.

Precedence: command-line flag > config file > built-in default.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .baselines import GlaConfig
from .sampler import SamplerConfig
from .sde import OuveParams
from .score import TrainingConfig
from .stft import StftConfig
from .transforms import CompressionParams

__all__ = ["CliConfig", "ConfigError", "parse_config_text", "load_config"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CliConfig:
    # SDE
    sigma_min: float = 0.05
    sigma_max: float = 0.5
    gamma: float = 1.5
    T: float = 1.0
    t_eps: float = 0.03
    # compression
    alpha: float = 0.5
    beta: float = 0.15
    # STFT
    window: int = 510
    hop: int = 128
    sample_rate: int = 16000
    # sampler
    steps: int = 30
    seed: int = 0
    enforce_magnitude: bool = True
    # training
    learning_rate: float = 1e-4
    train_steps: int = 2000
    batch_size: int = 4
    slice_frames: int = 256
    checkpoint_every: int = 0
    # GLA
    iterations: int = 200

    def __post_init__(self):
        # constructing every owned type runs its invariant checks
        try:
            self.sde()
            self.compression()
            self.stft()
            self.sampler()
            self.training()
            self.gla()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def sde(self) -> OuveParams:
        return OuveParams(self.sigma_min, self.sigma_max, self.gamma, self.T, self.t_eps)

    def compression(self) -> CompressionParams:
        return CompressionParams(self.alpha, self.beta)

    def stft(self) -> StftConfig:
        return StftConfig(window_len=self.window, hop=self.hop, expected_rate=self.sample_rate)

    def sampler(self) -> SamplerConfig:
        return SamplerConfig(self.steps, self.seed, self.enforce_magnitude)

    def training(self) -> TrainingConfig:
        return TrainingConfig(self.learning_rate, self.train_steps, self.batch_size, self.slice_frames,
                              self.seed, self.checkpoint_every)

    def gla(self) -> GlaConfig:
        return GlaConfig(self.iterations)

    def updated(self, overrides: dict) -> "CliConfig":
        return replace(self, **_coerce(overrides))

    def to_text(self) -> str:
        return "".join(f"{f.name}={getattr(self, f.name)}\n" for f in fields(self))


_FIELD_TYPES = {f.name: f.type for f in fields(CliConfig)}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _convert(key, raw):
    kind = _FIELD_TYPES[key]
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    try:
        if kind == "bool":
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(raw)
        if kind == "int":
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from None


def _coerce(values: dict) -> dict:
    out = {}
    for key, raw in values.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        out[key] = _convert(key, raw)
    return out


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        values[key.strip()] = value.strip()
    return _coerce(values)


def load_config(path=None, overrides: dict | None = None) -> CliConfig:
    values = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    values.update(_coerce({k: v for k, v in (overrides or {}).items() if v is not None}))
    try:
        return CliConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
