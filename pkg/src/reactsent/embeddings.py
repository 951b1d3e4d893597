"""Vocabulary construction and word-vector matrices."""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

PAD, OOV = 0, 1
PAD_TOKEN, OOV_TOKEN = "<pad>", "<oov>"
INIT_SCALE = 0.1


class EmbeddingError(ValueError):
    pass


class Vocabulary:
    """Token/index map with PAD at 0 and OOV at 1."""

    def __init__(self, tokens: Sequence[str] = ()):
        self.itos = [PAD_TOKEN, OOV_TOKEN]
        self.stoi: dict[str, int] = {}
        for tok in tokens:
            if tok in self.stoi or tok in (PAD_TOKEN, OOV_TOKEN):
                raise EmbeddingError(f"duplicate vocabulary token {tok!r}")
            self.stoi[tok] = len(self.itos)
            self.itos.append(tok)

    def __len__(self) -> int:
        return len(self.itos)

    def __contains__(self, token: str) -> bool:
        return token in self.stoi

    def index(self, token: str) -> int:
        return self.stoi.get(token, OOV)

    @property
    def tokens(self) -> list[str]:
        return self.itos[2:]

    def digest(self) -> str:
        h = hashlib.sha256("\n".join(self.tokens).encode("utf-8"))
        return h.hexdigest()[:16]


def build_vocab(corpus: Iterable[Sequence[str]], min_count: int = 1) -> Vocabulary:
    """Tokens with frequency >= min_count, by descending frequency then lexicographically."""
    if min_count < 1:
        raise EmbeddingError("min_count must be >= 1")
    freq = Counter()
    for tokens in corpus:
        freq.update(tokens)
    kept = [tok for tok, c in freq.items() if c >= min_count]
    kept.sort(key=lambda tok: (-freq[tok], tok))
    return Vocabulary(kept)


@dataclass
class EmbeddingMatrix:
    vectors: np.ndarray
    trainable: bool = False

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] < 2:
            raise EmbeddingError("embedding matrix needs shape (|vocab| >= 2, dim)")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]


def random_embeddings(vocab: Vocabulary, dim: int = 300, seed: int = 0,
                      trainable: bool = False) -> EmbeddingMatrix:
    if dim < 1:
        raise EmbeddingError("embedding dim must be positive")
    rng = np.random.default_rng(seed)
    vectors = rng.uniform(-INIT_SCALE, INIT_SCALE, size=(len(vocab), dim))
    vectors[PAD] = 0.0
    return EmbeddingMatrix(vectors, trainable)


def _parse_floats(parts: list[str], lineno: int) -> np.ndarray:
    try:
        return np.array([float(x) for x in parts], dtype=np.float64)
    except ValueError:
        raise EmbeddingError(f"malformed vector value at line {lineno}") from None


def load_pretrained(path: str | Path, vocab: Vocabulary, dim: int | None = None,
                    seed: int = 0, trainable: bool = False) -> EmbeddingMatrix:
    """Read a textual word-vector file (optional ``count dim`` header line).

    Vocabulary tokens missing from the file keep a seeded uniform(-0.1, 0.1)
    initialisation; OOV becomes the mean of the loaded vectors and PAD is zero.
    If ``dim`` is None it is taken from the header or the first vector line.
    """
    path = Path(path)
    if not path.exists():
        raise EmbeddingError(f"embedding file not found: {path}")
    found: dict[int, np.ndarray] = {}
    vectors = None
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").rstrip(" ").split(" ")
            if not line.strip():
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                header_dim = int(parts[1])
                if dim is not None and header_dim != dim:
                    raise EmbeddingError(
                        f"dimension mismatch at line 1: header says {header_dim}, expected {dim}"
                    )
                dim = header_dim
                continue
            token, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
            if len(values) != dim:
                raise EmbeddingError(
                    f"dimension mismatch at line {lineno}: {len(values)} values, expected {dim}"
                )
            vec = _parse_floats(values, lineno)
            if vectors is None:
                vectors = random_embeddings(vocab, dim, seed).vectors
            idx = vocab.stoi.get(token)
            if idx is not None and idx not in found:
                found[idx] = vec
    if dim is None:
        raise EmbeddingError(f"no vectors in {path}")
    if vectors is None:
        vectors = random_embeddings(vocab, dim, seed).vectors
    for idx, vec in found.items():
        vectors[idx] = vec
    if found:
        vectors[OOV] = np.mean(np.stack([found[i] for i in sorted(found)]), axis=0)
    vectors[PAD] = 0.0
    return EmbeddingMatrix(vectors, trainable)


def encode(tokens: Sequence[str], vocab: Vocabulary, max_len: int) -> tuple[np.ndarray, np.ndarray]:
    """Index ids and mask, right-truncated and right-padded to ``max_len``."""
    if max_len < 1:
        raise EmbeddingError("max_len must be >= 1")
    ids = np.full(max_len, PAD, dtype=np.int64)
    mask = np.zeros(max_len, dtype=np.float64)
    head = [vocab.index(t) for t in tokens[:max_len]]
    ids[:len(head)] = head
    mask[:len(head)] = 1.0
    return ids, mask


def encode_batch(sequences: Sequence[Sequence[str]], vocab: Vocabulary,
                 max_len: int) -> tuple[np.ndarray, np.ndarray]:
    ids = np.full((len(sequences), max_len), PAD, dtype=np.int64)
    mask = np.zeros((len(sequences), max_len), dtype=np.float64)
    for i, tokens in enumerate(sequences):
        ids[i], mask[i] = encode(tokens, vocab, max_len)
    return ids, mask


def embed_sequence(tokens: Sequence[str], vocab: Vocabulary, matrix: EmbeddingMatrix,
                   max_len: int = 128) -> tuple[np.ndarray, np.ndarray]:
    ids, mask = encode(tokens, vocab, max_len)
    return matrix.vectors[ids] * mask[:, None], mask
