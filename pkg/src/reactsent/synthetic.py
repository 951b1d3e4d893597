"""Synthetic reaction-annotated corpora with a planted sentiment lexicon.

Each post has a latent (clean) label. Its message mixes neutral tokens with a
few tokens from the lexicon of its class, plus Latin/URL/digit noise that the
normaliser strips. Reaction counts follow the latent label, except that a
``label_noise`` fraction of posts get their positive and negative reaction
groups swapped, so their reaction-derived label disagrees with the latent one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .annotate import SentimentLabel
from .corpus import Corpus, RawPost

CONSONANTS = [chr(c) for c in range(0x0D9A, 0x0DC7) if c not in (0x0DB2, 0x0DBC, 0x0DBE, 0x0DBF)]
VOWEL_SIGNS = [chr(c) for c in (0x0DCF, 0x0DD0, 0x0DD2, 0x0DD3, 0x0DD4, 0x0DD6, 0x0DD9, 0x0DDA, 0x0DDC)]
NOISE = ["https://example.com/p", "www.news.lk", "@admin", "#news", "2020", "ok", "LOL", "a.b@c.lk"]


@dataclass
class SyntheticCorpus:
    corpus: Corpus
    clean_labels: dict[str, SentimentLabel]
    positive_lexicon: list[str]
    negative_lexicon: list[str]
    neutral_lexicon: list[str]


def _make_words(rng: np.random.Generator, n: int, taken: set[str]) -> list[str]:
    words = []
    while len(words) < n:
        syllables = rng.integers(2, 5)
        word = ""
        for _ in range(syllables):
            word += CONSONANTS[rng.integers(len(CONSONANTS))]
            if rng.random() < 0.6:
                word += VOWEL_SIGNS[rng.integers(len(VOWEL_SIGNS))]
        if word not in taken:
            taken.add(word)
            words.append(word)
    return words


def generate(n_posts: int = 2000, n_positive: int = 200, n_negative: int = 200,
             n_neutral: int = 400, label_noise: float = 0.1, positive_rate: float = 0.65,
             min_len: int = 4, max_len: int = 12, signal: tuple[int, int] = (2, 4),
             contrary_rate: float = 0.2, noise_rate: float = 0.3,
             seed: int = 0) -> SyntheticCorpus:
    rng = np.random.default_rng(seed)
    taken: set[str] = set()
    pos_words = _make_words(rng, n_positive, taken)
    neg_words = _make_words(rng, n_negative, taken)
    neutral = _make_words(rng, n_neutral, taken)
    posts, clean = [], {}
    for i in range(n_posts):
        positive = rng.random() < positive_rate
        own, other = (pos_words, neg_words) if positive else (neg_words, pos_words)
        length = int(rng.integers(min_len, max_len + 1))
        n_signal = int(rng.integers(signal[0], signal[1] + 1))
        tokens = [own[j] for j in rng.integers(0, len(own), n_signal)]
        if rng.random() < contrary_rate:
            tokens.append(other[rng.integers(len(other))])
        n_fill = max(length - len(tokens), 0)
        tokens += [neutral[j] for j in rng.integers(0, len(neutral), n_fill)]
        tokens = [tokens[j] for j in rng.permutation(len(tokens))]
        if rng.random() < noise_rate:
            tokens.insert(int(rng.integers(len(tokens) + 1)), NOISE[rng.integers(len(NOISE))])
        strong = int(rng.integers(5, 60))
        weak = int(rng.integers(0, max(strong // 3, 1)))
        if rng.random() < label_noise:
            strong, weak = weak, strong
        good, bad = (strong, weak) if positive else (weak, strong)
        love = int(rng.integers(0, good + 1))
        sad = int(rng.integers(0, bad + 1))
        post_id = f"syn{i:06d}"
        posts.append(RawPost(
            post_id=post_id,
            page_id=f"page{int(rng.integers(20)):02d}",
            created_time=f"2019-{1 + i % 12:02d}-{1 + i % 28:02d}T00:00:00",
            message=" ".join(tokens),
            like=int(rng.integers(0, 500)),
            love=love,
            wow=good - love,
            haha=int(rng.integers(0, 20)),
            sad=sad,
            angry=bad - sad,
            thankful=0,
        ))
        clean[post_id] = SentimentLabel.POSITIVE if positive else SentimentLabel.NEGATIVE
    return SyntheticCorpus(Corpus(posts, provenance=f"synthetic(seed={seed})"), clean,
                           pos_words, neg_words, neutral)
