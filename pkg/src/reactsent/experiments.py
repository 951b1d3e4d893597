"""Reusable experiment drivers (synthetic benchmark, reaction-share table)."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import baselines
from .annotate import annotate_corpus
from .corpus import SplitSpec, split_holdout
from .embeddings import build_vocab, random_embeddings
from .evaluation import MetricsReport, evaluate
from .neural.model import ModelSpec
from .neural.train import TrainConfig, predict, train
from .normalize import normalize
from .synthetic import generate

BILSTM_FAMILY = ("bilstm", "bilstm2", "bilstm3")


@dataclass(frozen=True)
class BenchmarkConfig:
    """Small-model settings that train in seconds on the synthetic corpus."""

    models: tuple[str, ...] = ("rnn",) + BILSTM_FAMILY
    n_posts: int = 2000
    label_noise: float = 0.1
    embedding_dim: int = 32
    hidden: int = 32
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-3
    patience: int = 5
    max_len: int = 32
    seed: int = 0


@dataclass
class BenchmarkResult:
    sizes: tuple[int, int, int]
    # evaluated against the generator's latent labels
    clean: dict[str, MetricsReport] = field(default_factory=dict)
    # evaluated against the reaction-derived (noisy) labels
    noisy: dict[str, MetricsReport] = field(default_factory=dict)
    epochs_run: dict[str, int] = field(default_factory=dict)
    seconds: float = 0.0

    def f1(self, name: str, clean: bool = True) -> float:
        return (self.clean if clean else self.noisy)[name].f1

    def family_f1(self, clean: bool = True) -> float:
        return max(self.f1(m, clean) for m in BILSTM_FAMILY if m in self.clean)


def synthetic_benchmark(cfg: BenchmarkConfig = BenchmarkConfig()) -> BenchmarkResult:
    start = time.perf_counter()
    data = generate(n_posts=cfg.n_posts, label_noise=cfg.label_noise, seed=cfg.seed)
    labeled, _ = annotate_corpus(data.corpus, tokenizer=normalize)
    tr, va, te = split_holdout(labeled, SplitSpec(seed=cfg.seed))
    result = BenchmarkResult((len(tr), len(va), len(te)))
    clean_gold = [data.clean_labels[p.post_id] for p in te]
    noisy_gold = [p.label for p in te]

    def record(name, predicted):
        result.clean[name] = evaluate(predicted, clean_gold, name=name, seed=cfg.seed)
        result.noisy[name] = evaluate(predicted, noisy_gold, name=name, seed=cfg.seed)

    table = baselines.fit_core(tr)
    record("core", [baselines.predict_core(p.tokens, table)[1] for p in te])
    star = baselines.fit_star(tr)
    record("star", [baselines.predict_star(p.tokens, star)[1] for p in te])
    record("majority", [baselines.majority_label(tr)] * len(te))

    vocab = build_vocab([p.tokens for p in tr])
    matrix = random_embeddings(vocab, cfg.embedding_dim, seed=cfg.seed, trainable=True)
    tcfg = TrainConfig(epochs=cfg.epochs, batch_size=cfg.batch_size, learning_rate=cfg.learning_rate,
                       patience=cfg.patience, max_len=cfg.max_len, seed=cfg.seed)
    for name in cfg.models:
        trained = train(ModelSpec.from_name(name, hidden=cfg.hidden), tr, va, vocab, matrix, tcfg)
        record(name, predict(trained, te)[0])
        result.epochs_run[name] = len(trained.history)
    result.seconds = time.perf_counter() - start
    return result
