"""Pipeline configuration: one JSON file, overridable from the command line."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .annotate import ZERO_POLICIES
from .evaluation import AVERAGINGS

BASELINE_MODELS = ("core", "star", "majority")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class NormalizerFlags:
    strip_nonprintable: bool = True
    remove_patterns: bool = True
    remove_numeric: bool = True
    remove_non_sinhala: bool = True
    remove_stopwords: bool = True


@dataclass(frozen=True)
class ModelOptions:
    hidden: int = 128
    readout: str = "last"
    dropout: float = 0.0


@dataclass(frozen=True)
class TrainOptions:
    epochs: int = 20
    batch_size: int = 64
    learning_rate: float = 1e-3
    clip_norm: float = 5.0
    patience: int = 3
    max_len: int = 128
    class_weighted: bool = False


@dataclass(frozen=True)
class PipelineConfig:
    corpus: str | None = None
    corpus_format: str = "csv"
    delimiter: str = ","
    stopwords: str | None = None
    embeddings: str | None = None
    embedding_dim: int = 300
    fine_tune_embeddings: bool = False
    min_count: int = 1
    output_dir: str = "runs/default"
    normalizer: NormalizerFlags = field(default_factory=NormalizerFlags)
    filter_annotatable: bool = False
    zero_policy: str = "drop"
    dev_test_ratio: tuple[int, int] = (8, 2)
    train_val_ratio: tuple[int, int] = (9, 1)
    models: tuple[str, ...] = ("core", "star", "rnn", "gru", "lstm", "bilstm",
                               "lstm2", "lstm3", "bilstm2", "bilstm3")
    model: ModelOptions = field(default_factory=ModelOptions)
    train: TrainOptions = field(default_factory=TrainOptions)
    averaging: str = "weighted"
    seed: int = 0

    def validate(self, check_paths: bool = True) -> "PipelineConfig":
        if self.zero_policy not in ZERO_POLICIES:
            raise ConfigError(f"zero_policy must be one of {ZERO_POLICIES}")
        if self.averaging not in AVERAGINGS:
            raise ConfigError(f"averaging must be one of {AVERAGINGS}")
        if self.corpus_format not in ("csv", "jsonl"):
            raise ConfigError("corpus_format must be csv or jsonl")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a non-negative 64-bit integer")
        if self.embedding_dim < 1 or self.min_count < 1:
            raise ConfigError("embedding_dim and min_count must be positive")
        if check_paths:
            for name in ("corpus", "stopwords", "embeddings"):
                value = getattr(self, name)
                if value is not None and not Path(value).exists():
                    raise ConfigError(f"{name} path does not exist: {value}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """Stable short hash of the effective configuration (output_dir excluded)."""
        payload = self.to_dict()
        payload.pop("output_dir")
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    def derive_seed(self, purpose: str) -> int:
        h = hashlib.sha256(f"{self.seed}:{purpose}".encode("utf-8")).digest()
        return int.from_bytes(h[:8], "big")

    def provenance(self, kind: str) -> dict:
        return {"kind": kind, "seed": self.seed, "config_digest": self.digest()}


_NESTED = {"normalizer": NormalizerFlags, "model": ModelOptions, "train": TrainOptions}


def from_dict(data: dict) -> PipelineConfig:
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    for key, value in data.items():
        if key in _NESTED:
            cls = _NESTED[key]
            sub_known = {f.name for f in fields(cls)}
            bad = set(value) - sub_known
            if bad:
                raise ConfigError(f"unknown keys in {key!r}: {sorted(bad)}")
            kwargs[key] = cls(**value)
        elif key in ("dev_test_ratio", "train_val_ratio"):
            kwargs[key] = tuple(value)
        elif key == "models":
            kwargs[key] = tuple(value)
        else:
            kwargs[key] = value
    return PipelineConfig(**kwargs)


def load_config(path: str | Path | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return from_dict(data)


def override(config: PipelineConfig, **changes) -> PipelineConfig:
    """Apply non-None overrides; keys ``model.x`` / ``train.x`` / ``normalizer.x`` reach nested options."""
    top, nested = {}, {}
    for key, value in changes.items():
        if value is None:
            continue
        if "." in key:
            group, name = key.split(".", 1)
            nested.setdefault(group, {})[name] = value
        else:
            top[key] = value
    for group, values in nested.items():
        top[group] = replace(getattr(config, group), **values)
    return replace(config, **top)


def parse_ratio(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError(f"ratio must look like 8:2, got {text!r}") from None
    return a, b
