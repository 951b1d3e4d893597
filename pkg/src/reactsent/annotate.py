"""Reaction-count normalisation, net sentiment and binary labelling.

Only love, wow (positive) and sad, angry (negative) take part; like, haha and
thankful are carried for statistics but never touch a score.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence


class SentimentLabel(str, enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"

    def __str__(self) -> str:
        return self.value


class NoConsideredReactions(ValueError):
    """A post has zero love/wow/sad/angry reactions, so its score is undefined."""


@dataclass(frozen=True)
class ReactionCounts:
    love: int = 0
    wow: int = 0
    sad: int = 0
    angry: int = 0
    like: int = 0
    haha: int = 0
    thankful: int = 0

    def __post_init__(self):
        for name, value in vars(self).items():
            if value < 0:
                raise ValueError(f"negative reaction count {name}={value}")

    @classmethod
    def from_post(cls, post) -> "ReactionCounts":
        return cls(
            love=post.love, wow=post.wow, sad=post.sad, angry=post.angry,
            like=post.like, haha=post.haha, thankful=post.thankful,
        )

    def scaled(self, k: int) -> "ReactionCounts":
        return ReactionCounts(**{name: value * k for name, value in vars(self).items()})


@dataclass(frozen=True)
class SentimentScore:
    t: int
    n_love: float
    n_wow: float
    n_sad: float
    n_angry: float
    pos: float
    neg: float
    sen: float

    @property
    def distribution(self) -> tuple[float, float, float, float]:
        return (self.n_love, self.n_wow, self.n_sad, self.n_angry)


def score(counts: ReactionCounts) -> SentimentScore:
    """Normalise the four considered reactions and derive pos, neg and sen.

    Every float is the correctly rounded value of the exact rational: pos and neg
    divide the integer group sums by t (equal to n_l + n_w and n_s + n_a), and sen
    divides their integer difference. A tie in counts therefore gives sen == 0.0
    exactly instead of a one-ulp residue.
    """
    t = counts.love + counts.wow + counts.sad + counts.angry
    if t == 0:
        raise NoConsideredReactions("no considered reactions (love+wow+sad+angry == 0)")
    positive = counts.love + counts.wow
    negative = counts.sad + counts.angry
    return SentimentScore(
        t=t,
        n_love=counts.love / t,
        n_wow=counts.wow / t,
        n_sad=counts.sad / t,
        n_angry=counts.angry / t,
        pos=positive / t,
        neg=negative / t,
        sen=(positive - negative) / t,
    )


def classify_sen(sen: float) -> SentimentLabel:
    return SentimentLabel.POSITIVE if sen >= 0 else SentimentLabel.NEGATIVE


def classify(s: SentimentScore) -> SentimentLabel:
    return classify_sen(s.sen)


@dataclass
class LabeledPost:
    post_id: str
    tokens: list[str]
    sen: float
    label: SentimentLabel
    # (n_love, n_wow, n_sad, n_angry); None when the post had no considered reactions
    distribution: tuple[float, float, float, float] | None = None

    def to_record(self) -> dict:
        rec = {
            "post_id": self.post_id,
            "tokens": " ".join(self.tokens),
            "sen": self.sen,
            "label": self.label.value,
        }
        if self.distribution is not None:
            rec["distribution"] = list(self.distribution)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "LabeledPost":
        dist = rec.get("distribution")
        return cls(
            post_id=str(rec["post_id"]),
            tokens=rec["tokens"].split() if isinstance(rec["tokens"], str) else list(rec["tokens"]),
            sen=float(rec["sen"]),
            label=SentimentLabel(rec["label"]),
            distribution=tuple(dist) if dist is not None else None,
        )


ZERO_POLICIES = ("drop", "positive")


def annotate_posts(
    items: Iterable[tuple[str, Sequence[str], ReactionCounts]],
    zero_policy: str = "drop",
) -> tuple[list[LabeledPost], Counter]:
    """Label ``(post_id, tokens, counts)`` triples.

    ``zero_policy`` decides the fate of posts without considered reactions:
    ``drop`` removes them, ``positive`` keeps them with sen = 0.
    """
    if zero_policy not in ZERO_POLICIES:
        raise ValueError(f"zero_policy must be one of {ZERO_POLICIES}, got {zero_policy!r}")
    labeled = []
    hist = Counter({SentimentLabel.POSITIVE.value: 0, SentimentLabel.NEGATIVE.value: 0})
    for post_id, tokens, counts in items:
        try:
            s = score(counts)
        except NoConsideredReactions:
            if zero_policy == "drop":
                continue
            post = LabeledPost(post_id, list(tokens), 0.0, SentimentLabel.POSITIVE, None)
        else:
            post = LabeledPost(post_id, list(tokens), s.sen, classify(s), s.distribution)
        labeled.append(post)
        hist[post.label.value] += 1
    return labeled, hist


def annotate_corpus(corpus, zero_policy: str = "drop", tokenizer=None):
    """Label every post of a corpus; ``tokenizer`` maps a message to tokens (default: split)."""
    tokenizer = tokenizer or str.split
    return annotate_posts(
        ((p.post_id, tokenizer(p.message), ReactionCounts.from_post(p)) for p in corpus),
        zero_policy=zero_policy,
    )
