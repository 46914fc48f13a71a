"""Tokenization, nBOW construction and corpus records."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .embeddings import EmbeddingTable

# letter-dot abbreviations ("u.s."), words with inner apostrophes/hyphens, or one
# punctuation character
_TOKEN_RE = re.compile(r"(?:\w\.){2,}|\w+(?:['\-]\w+)*|[^\w\s]")
_WORDLIKE_RE = re.compile(r"\w")


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    strip_punct: bool = True


DEFAULT_TOKENIZER = TokenizerConfig()


@dataclass(frozen=True)
class Sentence:
    raw: str
    tokens: tuple[str, ...]

    def __post_init__(self):
        if any(not t for t in self.tokens):
            raise ValueError("sentence tokens must be non-empty strings")

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def tokenize(raw: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> Sentence:
    text = raw.lower() if config.lowercase else raw
    tokens = _TOKEN_RE.findall(text)
    if config.strip_punct:
        tokens = [t for t in tokens if _WORDLIKE_RE.search(t)]
    return Sentence(raw, tuple(tokens))


def concat_sentences(sentences: Sequence[Sentence]) -> Sentence:
    """Sentence concatenation used to build n-to-one paraphraser inputs."""
    if not sentences:
        raise ValueError("concat_sentences needs at least one sentence")
    if len(sentences) == 1:
        return sentences[0]
    raw = " ".join(s.raw for s in sentences)
    tokens = tuple(t for s in sentences for t in s.tokens)
    return Sentence(raw, tokens)


@dataclass(frozen=True)
class NBow:
    """Normalized bag of words over embedding token-ids.

    ``support`` follows first-occurrence order in the source sentence.
    """

    support: tuple[int, ...]
    weights: np.ndarray
    source_token_count: int

    @property
    def empty(self) -> bool:
        return not self.support

    def __len__(self) -> int:
        return len(self.support)


def to_nbow(sentence: Sentence, table: EmbeddingTable, stopwords: frozenset[str] | None = None) -> NBow:
    counts: Counter[int] = Counter()
    for tok in sentence.tokens:
        if stopwords and tok in stopwords:
            continue
        idx = table.vocab.get(tok)
        if idx is not None:
            counts[idx] += 1
    support = tuple(counts)  # Counter keeps insertion order
    if not support:
        return NBow((), np.zeros(0), len(sentence.tokens))
    c = np.array([counts[i] for i in support], dtype=np.float64)
    return NBow(support, c / c.sum(), len(sentence.tokens))


def load_stopwords(path) -> frozenset[str]:
    """One token per line; blank lines and ``#`` comments are ignored."""
    words = set()
    with open(Path(path), encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line)
    return frozenset(words)


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    ref = resources.files("semoverlap") / "data" / "stopwords_en.txt"
    with resources.as_file(ref) as p:
        return load_stopwords(p)


@dataclass(frozen=True)
class CorpusPair:
    id: str
    document: tuple[Sentence, ...]
    summary: tuple[Sentence, ...]

    def __post_init__(self):
        if not self.document:
            raise ValueError(f"pair {self.id!r}: document has no sentences")
        if not self.summary:
            raise ValueError(f"pair {self.id!r}: summary has no sentences")

    @classmethod
    def from_record(cls, record: Mapping, config: TokenizerConfig = DEFAULT_TOKENIZER) -> "CorpusPair":
        """Build from a ``{"id", "document": [str], "summary": [str]}`` record."""
        try:
            pid = record["id"]
            doc = record["document"]
            summ = record["summary"]
        except (KeyError, TypeError) as e:
            raise ValueError(f"corpus record missing field {e}") from None
        if not isinstance(pid, str):
            raise ValueError(f"corpus record id must be a string, got {pid!r}")
        for name, value in (("document", doc), ("summary", summ)):
            if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
                raise ValueError(f"pair {pid!r}: {name} must be a list of strings")
        return cls(
            pid,
            tuple(tokenize(s, config) for s in doc),
            tuple(tokenize(s, config) for s in summ),
        )


def sentences_from_strings(strings: Iterable[str], config: TokenizerConfig = DEFAULT_TOKENIZER) -> list[Sentence]:
    return [tokenize(s, config) for s in strings]
