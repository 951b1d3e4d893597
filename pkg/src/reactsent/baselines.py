"""Token-averaging baselines: the Core Reaction Set model and the Star Rating model.

Both are reconstructions from a qualitative description: every token keeps the
mean of the per-post quantities (reaction distribution, or star value) over the
training posts that contain it, counted once per post. A new post is scored by
averaging its known tokens, falling back to the training-wide mean.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .annotate import LabeledPost, SentimentLabel, classify_sen


class BaselineError(ValueError):
    pass


def sen_to_star(sen: float) -> float:
    """Affine map of sen in [-1, 1] onto the [1, 5] star scale."""
    return 3.0 + 2.0 * sen


@dataclass
class TokenReactionTable:
    vectors: dict[str, np.ndarray] = field(default_factory=dict)
    support: dict[str, int] = field(default_factory=dict)
    global_mean: np.ndarray = field(default_factory=lambda: np.full(4, 0.25))

    def save(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            fh.write(json.dumps({"_meta": {"kind": "core", "global_mean": self.global_mean.tolist()}}) + "\n")
            for tok in sorted(self.vectors):
                fh.write(json.dumps(
                    {"token": tok, "vector": self.vectors[tok].tolist(), "support": self.support[tok]},
                    ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "TokenReactionTable":
        table = cls()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            rec = json.loads(line)
            if "_meta" in rec:
                table.global_mean = np.array(rec["_meta"]["global_mean"])
                continue
            table.vectors[rec["token"]] = np.array(rec["vector"])
            table.support[rec["token"]] = rec["support"]
        return table


def _scored(train: Sequence[LabeledPost]) -> list[LabeledPost]:
    usable = [p for p in train if p.distribution is not None]
    if not usable:
        raise BaselineError("training set has no posts with reaction scores")
    return usable


def fit_core(train: Sequence[LabeledPost]) -> TokenReactionTable:
    posts = _scored(train)
    sums: dict[str, np.ndarray] = {}
    support: dict[str, int] = {}
    for post in posts:
        dist = np.asarray(post.distribution, dtype=np.float64)
        for tok in set(post.tokens):
            if tok in sums:
                sums[tok] += dist
                support[tok] += 1
            else:
                sums[tok] = dist.copy()
                support[tok] = 1
    vectors = {tok: sums[tok] / support[tok] for tok in sums}
    global_mean = np.mean([p.distribution for p in posts], axis=0)
    return TokenReactionTable(vectors, support, global_mean)


def predict_core(tokens: Sequence[str], table: TokenReactionTable) -> tuple[np.ndarray, SentimentLabel]:
    known = [table.vectors[t] for t in tokens if t in table.vectors]
    pred = np.mean(known, axis=0) if known else table.global_mean.copy()
    sen = (pred[0] + pred[1]) - (pred[2] + pred[3])
    return pred, classify_sen(sen)


@dataclass
class StarModel:
    stars: dict[str, float] = field(default_factory=dict)
    support: dict[str, int] = field(default_factory=dict)
    prior: float = 3.0

    def save(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            fh.write(json.dumps({"_meta": {"kind": "star", "prior": self.prior}}) + "\n")
            for tok in sorted(self.stars):
                fh.write(json.dumps(
                    {"token": tok, "star": self.stars[tok], "support": self.support[tok]},
                    ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "StarModel":
        model = cls()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            rec = json.loads(line)
            if "_meta" in rec:
                model.prior = rec["_meta"]["prior"]
                continue
            model.stars[rec["token"]] = rec["star"]
            model.support[rec["token"]] = rec["support"]
        return model


def fit_star(train: Sequence[LabeledPost]) -> StarModel:
    if not train:
        raise BaselineError("empty training set")
    sums: dict[str, float] = {}
    support: dict[str, int] = {}
    for post in train:
        star = sen_to_star(post.sen)
        for tok in set(post.tokens):
            sums[tok] = sums.get(tok, 0.0) + star
            support[tok] = support.get(tok, 0) + 1
    stars = {tok: sums[tok] / support[tok] for tok in sums}
    prior = float(np.mean([sen_to_star(p.sen) for p in train]))
    return StarModel(stars, support, prior)


def predict_star(tokens: Sequence[str], model: StarModel) -> tuple[float, SentimentLabel]:
    known = [model.stars[t] for t in tokens if t in model.stars]
    star = float(np.mean(known)) if known else model.prior
    label = SentimentLabel.POSITIVE if star >= 3.0 else SentimentLabel.NEGATIVE
    return star, label


def majority_label(train: Sequence[LabeledPost]) -> SentimentLabel:
    pos = sum(p.label is SentimentLabel.POSITIVE for p in train)
    return SentimentLabel.POSITIVE if 2 * pos >= len(train) else SentimentLabel.NEGATIVE
