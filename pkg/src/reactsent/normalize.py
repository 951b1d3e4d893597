"""Cleaning pipeline that turns raw post text into Sinhala-only tokens.

Stages run in a fixed order: non-printable replacement, pattern removal
(emails, URLs, @tags, #tags), numeric-token removal, non-Sinhala-token removal,
whitespace collapse and tokenisation, stopword removal.

Unicode general categories come from the interpreter's ``unicodedata``
(``UNICODE_VERSION``); fixtures are pinned against Unicode 13.0.0.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

UNICODE_VERSION = unicodedata.unidata_version

ZWJ = "\u200d"
SINHALA_FIRST = 0x0D80
SINHALA_LAST = 0x0DFF

# characters of these categories become a space; Cf too, except ZWJ which is deleted
SPACED_CATEGORIES = frozenset({"Cc", "Cn", "Co", "Cs", "Cf"})

EMAIL_RE = re.compile(r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,}")
URL_RE = re.compile(r"(?:[A-Za-z][A-Za-z0-9+.\-]*://|www\.)\S*", re.IGNORECASE)
USER_TAG_RE = re.compile(r"(?<!\S)@\S*")
HASHTAG_RE = re.compile(r"(?<!\S)#\S*")


def is_sinhala_char(ch: str) -> bool:
    return SINHALA_FIRST <= ord(ch) <= SINHALA_LAST or ch == ZWJ


@dataclass(frozen=True)
class NormalizerConfig:
    stopwords: frozenset[str] = field(default_factory=frozenset)
    strip_nonprintable: bool = True
    remove_patterns: bool = True
    remove_numeric: bool = True
    remove_non_sinhala: bool = True
    remove_stopwords: bool = True

    def __post_init__(self):
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))
        for word in self.stopwords:
            if not word or any(ch.isspace() for ch in word):
                raise ValueError(f"invalid stopword {word!r}: must be non-empty and whitespace-free")


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One token per line, UTF-8; blank lines and ``#`` comment lines are skipped."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        token = line.strip()
        if not token or token.startswith("#"):
            continue
        if any(ch.isspace() for ch in token):
            raise ValueError(f"stopword line contains whitespace: {token!r}")
        words.add(token)
    return frozenset(words)


def strip_nonprintable(text: str) -> str:
    out = []
    for ch in text:
        if ch == ZWJ:
            continue
        if unicodedata.category(ch) in SPACED_CATEGORIES:
            out.append(" ")
        else:
            out.append(ch)
    return "".join(out)


def remove_patterns(text: str) -> str:
    # matched spans are deleted outright; surrounding whitespace is left to the collapse stage
    for pattern in (EMAIL_RE, URL_RE, USER_TAG_RE, HASHTAG_RE):
        text = pattern.sub("", text)
    return text


def remove_numeric_tokens(text: str) -> str:
    return " ".join(
        tok for tok in text.split() if not any(unicodedata.category(ch) == "Nd" for ch in tok)
    )


def remove_non_sinhala_tokens(text: str) -> str:
    return " ".join(tok for tok in text.split() if all(is_sinhala_char(ch) for ch in tok))


def remove_stopwords(tokens: list[str], config: NormalizerConfig) -> list[str]:
    if not config.stopwords:
        return list(tokens)
    return [tok for tok in tokens if tok not in config.stopwords]


def collapse_whitespace(text: str) -> str:
    return " ".join(text.split())


def normalize(message: str, config: NormalizerConfig = NormalizerConfig()) -> list[str]:
    """Run the full cleaning pipeline and return the surviving tokens."""
    text = message
    if config.strip_nonprintable:
        text = strip_nonprintable(text)
    if config.remove_patterns:
        text = remove_patterns(text)
    if config.remove_numeric:
        text = remove_numeric_tokens(text)
    if config.remove_non_sinhala:
        text = remove_non_sinhala_tokens(text)
    tokens = collapse_whitespace(text).split(" ") if text.strip() else []
    if config.remove_stopwords:
        tokens = remove_stopwords(tokens, config)
    return tokens
