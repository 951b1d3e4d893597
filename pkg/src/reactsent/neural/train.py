"""Mini-batch Adam training with early stopping on validation F1."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..annotate import LabeledPost, SentimentLabel
from ..embeddings import EmbeddingMatrix, Vocabulary, encode_batch
from ..evaluation import evaluate
from .model import ModelSpec, RecurrentClassifier, bce_with_logits

logger = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    batch_size: int = 64
    learning_rate: float = 1e-3
    clip_norm: float = 5.0
    patience: int = 3
    seed: int = 0
    max_len: int = 128
    fine_tune_embeddings: bool = False
    class_weighted: bool = False

    def __post_init__(self):
        for name in ("epochs", "batch_size", "learning_rate", "clip_norm", "patience", "max_len"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


class Adam:
    def __init__(self, params: dict[str, np.ndarray], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for k, p in self.params.items():
            g = grads[k]
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g
            p -= self.lr * (self.m[k] / c1) / (np.sqrt(self.v[k] / c2) + self.eps)


def clip_by_global_norm(grads: dict[str, np.ndarray], max_norm: float) -> float:
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if norm > max_norm:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm


class EarlyStopper:
    """Tracks the best score; ``update`` returns True once ``patience`` epochs pass without improvement."""

    def __init__(self, patience: int):
        if patience <= 0:
            raise ValueError("patience must be positive")
        self.patience = patience
        self.best = -np.inf
        self.best_epoch = 0
        self.wait = 0

    def improved(self, score: float) -> bool:
        return score > self.best

    def update(self, epoch: int, score: float) -> bool:
        if score > self.best:
            self.best, self.best_epoch, self.wait = score, epoch, 0
            return False
        self.wait += 1
        return self.wait >= self.patience


@dataclass
class TrainedModel:
    spec: ModelSpec
    model: RecurrentClassifier
    vocab: Vocabulary
    config: TrainConfig
    history: list[dict] = field(default_factory=list)
    initial_loss: float = float("nan")
    best_epoch: int = 0

    def predict(self, posts, threshold: float = 0.5):
        return predict(self, posts, threshold)


def _labels(posts: Sequence[LabeledPost]) -> np.ndarray:
    return np.array([1.0 if p.label is SentimentLabel.POSITIVE else 0.0 for p in posts])


def _tokens(post):
    return post.tokens if hasattr(post, "tokens") else post


def _trim(ids, mask):
    # trailing all-PAD columns never change any output
    width = max(int(mask.sum(axis=1).max()), 1)
    return ids[:, :width], mask[:, :width]


def predict_proba(model: RecurrentClassifier, vocab: Vocabulary, posts, max_len: int = 128,
                  batch_size: int = 256) -> np.ndarray:
    out = []
    for start in range(0, len(posts), batch_size):
        chunk = [_tokens(p) for p in posts[start:start + batch_size]]
        ids, mask = _trim(*encode_batch(chunk, vocab, max_len))
        out.append(model.predict_proba(ids, mask))
    return np.concatenate(out) if out else np.zeros(0)


def labels_from_proba(probs, threshold: float = 0.5) -> list[SentimentLabel]:
    return [SentimentLabel.POSITIVE if p >= threshold else SentimentLabel.NEGATIVE for p in probs]


def predict(trained: TrainedModel, posts, threshold: float = 0.5):
    """Labels (Positive iff p >= threshold) and probabilities."""
    probs = predict_proba(trained.model, trained.vocab, posts, trained.config.max_len)
    return labels_from_proba(probs, threshold), probs


def _dataset_loss(model, vocab, posts, y, max_len, weights):
    total = 0.0
    for start in range(0, len(posts), 256):
        chunk = posts[start:start + 256]
        ids, mask = _trim(*encode_batch([p.tokens for p in chunk], vocab, max_len))
        _, cache = model.forward(ids, mask)
        w = None if weights is None else weights[start:start + 256]
        total += bce_with_logits(cache.logits, y[start:start + 256], w)[0] * len(chunk)
    return total / len(posts)


def train(spec: ModelSpec, train_posts: Sequence[LabeledPost], val_posts: Sequence[LabeledPost],
          vocab: Vocabulary, embeddings: EmbeddingMatrix, config: TrainConfig = TrainConfig()) -> TrainedModel:
    """Fit a recurrent classifier; returns the parameters of the best validation-F1 epoch."""
    if not train_posts or not val_posts:
        raise ValueError("training and validation sets must be non-empty")
    if len(embeddings) != len(vocab):
        raise ValueError("embedding rows do not match vocabulary size")
    seeds = np.random.SeedSequence(config.seed).spawn(2)
    init_seed = int(seeds[0].generate_state(1)[0])
    rng = np.random.default_rng(seeds[1])
    fine_tune = config.fine_tune_embeddings or embeddings.trainable
    model = RecurrentClassifier(spec, embeddings.dim, seed=init_seed,
                                embedding=embeddings.vectors.copy(), train_embedding=fine_tune)
    optim = Adam(model.params, lr=config.learning_rate)

    train_posts = list(train_posts)
    y_all = _labels(train_posts)
    weights = None
    if config.class_weighted:
        pos_frac = y_all.mean()
        # inverse class frequency, normalised to mean weight 1
        w_pos = 0.5 / pos_frac if pos_frac > 0 else 0.0
        w_neg = 0.5 / (1.0 - pos_frac) if pos_frac < 1 else 0.0
        weights = np.where(y_all > 0, w_pos, w_neg)
    ids_all, mask_all = encode_batch([p.tokens for p in train_posts], vocab, config.max_len)
    val_gold = [p.label for p in val_posts]

    trained = TrainedModel(spec, model, vocab, config)
    trained.initial_loss = _dataset_loss(model, vocab, train_posts, y_all, config.max_len, weights)
    stopper, best_state = EarlyStopper(config.patience), model.state()
    n = len(train_posts)
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        losses, sizes = [], []
        for b, start in enumerate(range(0, n, config.batch_size), start=1):
            idx = order[start:start + config.batch_size]
            ids, mask = _trim(ids_all[idx], mask_all[idx])
            _, cache = model.forward(ids, mask, train=True, rng=rng)
            w = None if weights is None else weights[idx]
            loss, dlogits = bce_with_logits(cache.logits, y_all[idx], w)
            if not np.isfinite(loss):
                raise TrainingDiverged(f"non-finite loss at epoch {epoch}, batch {b}")
            grads = model.backward(cache, dlogits)
            clip_by_global_norm(grads, config.clip_norm)
            optim.step(grads)
            losses.append(loss)
            sizes.append(len(idx))
        train_loss = float(np.dot(losses, sizes) / n)
        val_pred = labels_from_proba(predict_proba(model, vocab, val_posts, config.max_len))
        val_f1 = evaluate(val_pred, val_gold).f1
        trained.history.append({"epoch": epoch, "train_loss": train_loss, "val_f1": val_f1})
        logger.info("%s epoch %d loss %.4f val F1 %.2f", spec.name, epoch, train_loss, val_f1)
        if stopper.improved(val_f1):
            best_state = model.state()
        stop = stopper.update(epoch, val_f1)
        trained.best_epoch = stopper.best_epoch
        if stop:
            break
    model.load_state(best_state)
    return trained
