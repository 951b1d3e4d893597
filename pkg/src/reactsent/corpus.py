"""Loading, validating, summarising and splitting reaction-annotated post corpora."""

from __future__ import annotations

import csv
import json
import logging
import random
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

logger = logging.getLogger(__name__)

REACTIONS = ("like", "love", "wow", "haha", "sad", "angry", "thankful")
CONSIDERED = ("love", "wow", "sad", "angry")
FIELDS = ("post_id", "page_id", "created_time", "message") + REACTIONS

FORMATS = ("csv", "jsonl")


class CorpusError(ValueError):
    """Raised when a corpus file or corpus operation is invalid."""


@dataclass(frozen=True)
class RawPost:
    post_id: str
    page_id: str
    created_time: str
    message: str
    like: int = 0
    love: int = 0
    wow: int = 0
    haha: int = 0
    sad: int = 0
    angry: int = 0
    thankful: int = 0

    def __post_init__(self):
        if not self.post_id:
            raise CorpusError("empty post_id")
        for name in REACTIONS:
            if getattr(self, name) < 0:
                raise CorpusError(f"negative reaction count {name}={getattr(self, name)}")

    def counts(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in REACTIONS}

    def to_record(self) -> dict:
        return {name: getattr(self, name) for name in FIELDS}


@dataclass
class Corpus:
    posts: list[RawPost] = field(default_factory=list)
    provenance: str = ""

    def __post_init__(self):
        seen = set()
        for post in self.posts:
            if post.post_id in seen:
                raise CorpusError(f"duplicate post_id {post.post_id!r}")
            seen.add(post.post_id)

    def __len__(self) -> int:
        return len(self.posts)

    def __iter__(self):
        return iter(self.posts)

    def ids(self) -> list[str]:
        return [p.post_id for p in self.posts]


def _parse_record(rec: dict, row: int) -> RawPost:
    missing = [f for f in FIELDS if f not in rec or rec[f] is None]
    if missing:
        raise CorpusError(f"missing field {missing[0]!r} at row {row}")
    counts = {}
    for name in REACTIONS:
        raw = rec[name]
        try:
            if isinstance(raw, bool):
                raise ValueError
            if isinstance(raw, float):
                if not raw.is_integer():
                    raise ValueError
                raw = int(raw)
            value = int(str(raw).strip()) if not isinstance(raw, int) else raw
        except ValueError:
            raise CorpusError(f"unparseable {name} count {raw!r} at row {row}") from None
        if value < 0:
            raise CorpusError(f"negative reaction count at row {row} ({name}={value})")
        counts[name] = value
    post_id = str(rec["post_id"]).strip()
    if not post_id:
        raise CorpusError(f"empty post_id at row {row}")
    return RawPost(
        post_id=post_id,
        page_id=str(rec["page_id"]),
        created_time=str(rec["created_time"]),
        message=str(rec["message"]),
        **counts,
    )


def _check_extra(keys: Iterable[str], path: Path) -> None:
    extra = sorted(set(keys) - set(FIELDS))
    if extra:
        warnings.warn(f"{path}: ignoring extra columns {extra}", stacklevel=3)


def _collect(posts: list[RawPost], rows: list[int], path: Path) -> Corpus:
    seen = {}
    for post, row in zip(posts, rows):
        if post.post_id in seen:
            raise CorpusError(
                f"duplicate post_id {post.post_id!r} at row {row} (first at row {seen[post.post_id]})"
            )
        seen[post.post_id] = row
    if not posts:
        warnings.warn(f"{path}: corpus is empty", stacklevel=3)
    return Corpus(posts, provenance=str(path))


def load_corpus(path: str | Path, format: str = "csv", delimiter: str = ",") -> Corpus:
    """Load a corpus from a delimited table (``csv``) or one JSON object per line (``jsonl``).

    Row numbers in error messages are 1-based file line numbers; for CSV the header
    is line 1.
    """
    path = Path(path)
    if format not in FORMATS:
        raise CorpusError(f"unknown corpus format {format!r}; expected one of {FORMATS}")
    if not path.exists():
        raise CorpusError(f"corpus file not found: {path}")
    posts, rows = [], []
    with path.open(encoding="utf-8", newline="") as fh:
        if format == "csv":
            reader = csv.DictReader(fh, delimiter=delimiter)
            if reader.fieldnames is None:
                return _collect(posts, rows, path)
            _check_extra(reader.fieldnames, path)
            missing = [f for f in FIELDS if f not in reader.fieldnames]
            if missing:
                raise CorpusError(f"missing field {missing[0]!r} in header (row 1)")
            try:
                for rec in reader:
                    if None in rec:
                        raise CorpusError(f"unparseable record at row {reader.line_num}: too many fields")
                    posts.append(_parse_record(rec, reader.line_num))
                    rows.append(reader.line_num)
            except csv.Error as exc:
                raise CorpusError(f"unparseable record at row {reader.line_num}: {exc}") from None
        else:
            warned = False
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"unparseable record at row {lineno}: {exc.msg}") from None
                if not isinstance(rec, dict):
                    raise CorpusError(f"unparseable record at row {lineno}: not an object")
                if not warned and set(rec) - set(FIELDS):
                    _check_extra(rec, path)
                    warned = True
                posts.append(_parse_record(rec, lineno))
                rows.append(lineno)
    return _collect(posts, rows, path)


def write_corpus(corpus: Corpus, path: str | Path, format: str = "jsonl") -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        if format == "csv":
            writer = csv.DictWriter(fh, fieldnames=FIELDS, lineterminator="\n")
            writer.writeheader()
            for post in corpus:
                writer.writerow(post.to_record())
        else:
            for post in corpus:
                fh.write(json.dumps(post.to_record(), ensure_ascii=False) + "\n")


@dataclass
class CorpusStats:
    """Table-1 style reaction summary. Percentages are on a 0-100 scale."""

    totals: dict[str, int]
    original_pct: dict[str, float]
    filtered_pct: dict[str, float]
    n_posts: int = 0

    def table(self) -> str:
        lines = [f"{'Reaction':<10}{'Count':>14}{'Original %':>12}{'Filtered %':>12}"]
        for name in REACTIONS:
            filt = f"{self.filtered_pct[name]:.2f}" if name in self.filtered_pct else "-"
            lines.append(
                f"{name.capitalize():<10}{self.totals[name]:>14,}"
                f"{self.original_pct[name]:>12.2f}{filt:>12}"
            )
        return "\n".join(lines)

    def to_record(self) -> dict:
        return {
            "n_posts": self.n_posts,
            "totals": self.totals,
            "original_pct": self.original_pct,
            "filtered_pct": self.filtered_pct,
        }


def stats_from_totals(totals: dict[str, int], n_posts: int = 0) -> CorpusStats:
    totals = {name: int(totals.get(name, 0)) for name in REACTIONS}
    grand = sum(totals.values())
    considered = sum(totals[name] for name in CONSIDERED)
    # degenerate denominators give 0% rather than NaN
    original = {n: (100.0 * totals[n] / grand if grand else 0.0) for n in REACTIONS}
    filtered = {n: (100.0 * totals[n] / considered if considered else 0.0) for n in CONSIDERED}
    return CorpusStats(totals, original, filtered, n_posts)


def compute_reaction_stats(corpus: Corpus) -> CorpusStats:
    if len(corpus) == 0:
        raise CorpusError("cannot compute reaction statistics of an empty corpus")
    totals = {name: 0 for name in REACTIONS}
    for post in corpus:
        for name in REACTIONS:
            totals[name] += getattr(post, name)
    return stats_from_totals(totals, len(corpus))


@dataclass
class FilterReport:
    kept: int
    no_considered_reactions: int
    empty_message: int


def filter_annotatable(corpus: Corpus) -> tuple[Corpus, FilterReport]:
    """Keep posts with a non-empty message and at least one love/wow/sad/angry reaction."""
    kept, no_react, empty = [], 0, 0
    for post in corpus:
        if not post.message.strip():
            empty += 1
        elif sum(getattr(post, n) for n in CONSIDERED) < 1:
            no_react += 1
        else:
            kept.append(post)
    report = FilterReport(len(kept), no_react, empty)
    logger.info(
        "filter_annotatable: kept %d, removed %d without considered reactions, %d empty",
        report.kept, no_react, empty,
    )
    return Corpus(kept, corpus.provenance), report


@dataclass(frozen=True)
class SplitSpec:
    dev_test_ratio: tuple[int, int] = (8, 2)
    train_val_ratio: tuple[int, int] = (9, 1)
    seed: int = 0

    def __post_init__(self):
        for pair in (self.dev_test_ratio, self.train_val_ratio):
            if len(pair) != 2 or min(pair) <= 0:
                raise CorpusError(f"split ratio weights must be two positive numbers, got {pair}")
        if not 0 <= self.seed < 2**64:
            raise CorpusError("split seed must fit in 64 bits")


def split_sizes(n: int, spec: SplitSpec) -> tuple[int, int, int]:
    """(train, val, test) sizes; flooring remainders land in train."""
    dev_w, test_w = spec.dev_test_ratio
    train_w, val_w = spec.train_val_ratio
    n_test = int(n * test_w // (dev_w + test_w))
    n_dev = n - n_test
    n_val = int(n_dev * val_w // (train_w + val_w))
    return n_dev - n_val, n_val, n_test


def split_holdout(items, spec: SplitSpec = SplitSpec(), min_size: int = 10):
    """Seeded shuffle followed by dev/test then train/val partitioning.

    Works on a :class:`Corpus` (returns three corpora) or on any sequence (returns
    three lists).
    """
    seq = list(items)
    if len(seq) < min_size:
        raise CorpusError(f"corpus too small to split: {len(seq)} < {min_size}")
    order = list(range(len(seq)))
    # random.shuffle is Fisher-Yates
    random.Random(spec.seed).shuffle(order)
    n_train, n_val, _ = split_sizes(len(seq), spec)
    parts = (
        [seq[i] for i in order[:n_train]],
        [seq[i] for i in order[n_train:n_train + n_val]],
        [seq[i] for i in order[n_train + n_val:]],
    )
    if isinstance(items, Corpus):
        return tuple(Corpus(p, items.provenance) for p in parts)
    return parts


def split_manifest(train, val, test, spec: SplitSpec, **extra) -> dict:
    def ids(part):
        return [p.post_id for p in part]

    manifest = {
        "seed": spec.seed,
        "dev_test_ratio": list(spec.dev_test_ratio),
        "train_val_ratio": list(spec.train_val_ratio),
        "sizes": {"train": len(train), "val": len(val), "test": len(test)},
        "splits": {"train": ids(train), "val": ids(val), "test": ids(test)},
    }
    manifest.update(extra)
    return manifest
