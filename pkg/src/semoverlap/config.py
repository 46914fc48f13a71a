"""Run configuration: defaults < config file < command-line flags."""

from __future__ import annotations

import dataclasses
import os
import sys
from dataclasses import dataclass, field, fields

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .overlap import RewardParams
from .textproc import TokenizerConfig, default_stopwords, load_stopwords

CONFIG_ENV = "SEMOVERLAP_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    embeddings: str | None = None
    embeddings_format: str = "text"
    limit: int | None = None
    normalize: bool = False
    # "builtin", "none", or a path to a stopword file
    stopwords: str = "builtin"
    lowercase: bool = True
    strip_punct: bool = True
    a: float = 1.0
    b: float = 0.5
    n: int = 1
    alpha: int = 5
    prune: bool = True
    workers: int = 1
    out: str = "."
    csv: bool = False
    extra: dict = field(default_factory=dict, repr=False)

    def validate(self) -> "RunConfig":
        if self.embeddings_format not in ("text", "binary"):
            raise ConfigError(f"embeddings_format must be 'text' or 'binary', got {self.embeddings_format!r}")
        if self.limit is not None and self.limit < 1:
            raise ConfigError("limit must be >= 1")
        if not self.a >= 0:
            raise ConfigError(f"a must be >= 0, got {self.a}")
        if not self.b > 0:
            raise ConfigError(f"b must be > 0, got {self.b}")
        for name in ("n", "alpha", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        return self

    @property
    def reward_params(self) -> RewardParams:
        return RewardParams(self.a, self.b)

    @property
    def tokenizer(self) -> TokenizerConfig:
        return TokenizerConfig(self.lowercase, self.strip_punct)

    def load_stopwords(self) -> frozenset[str] | None:
        if self.stopwords == "none":
            return None
        if self.stopwords == "builtin":
            return default_stopwords()
        return load_stopwords(self.stopwords)

    def metadata(self, command: str, **extra) -> dict:
        """Self-describing header. Excludes knobs that must not change output
        bytes (worker count, output location)."""
        cfg = {f.name: getattr(self, f.name) for f in fields(self) if f.name not in ("workers", "out", "extra")}
        return {"tool": "semoverlap", "version": __version__, "command": command, "config": cfg, **extra}


def _coerce(name: str, value):
    kinds = {f.name: f.type for f in fields(RunConfig)}
    kind = kinds[name]
    if value is None:
        return None
    try:
        if "bool" in kind:
            if not isinstance(value, bool):
                raise TypeError
            return value
        if kind.startswith("int"):
            if isinstance(value, bool):
                raise TypeError
            return int(value)
        if kind.startswith("float"):
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"config key {name!r}: bad value {value!r}") from None


def load_config_file(path) -> dict:
    try:
        with open(path, "rb") as f:
            raw = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from None
    known = {f.name for f in fields(RunConfig)} - {"extra"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {unknown}")
    return {k: _coerce(k, v) for k, v in raw.items()}


def resolve(flags: dict, config_path: str | None = None) -> RunConfig:
    """Merge defaults, the config file (explicit path or ``$SEMOVERLAP_CONFIG``)
    and flags whose value is not None."""
    values = {}
    path = config_path or os.environ.get(CONFIG_ENV)
    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        values.update(load_config_file(path))
    values.update({k: v for k, v in flags.items() if v is not None})
    return dataclasses.replace(RunConfig(), **values).validate()
