"""Synthetic embeddings and corpora for tests, benchmarks and demos."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingTable


def random_table(vocab_size: int, dim: int, rng: np.random.Generator, prefix: str = "w") -> EmbeddingTable:
    tokens = [f"{prefix}{i}" for i in range(vocab_size)]
    vectors = rng.normal(size=(vocab_size, dim))
    return EmbeddingTable(dim, {t: i for i, t in enumerate(tokens)}, vectors, source={"format": "synthetic"})


def random_sentence(rng: np.random.Generator, vocab: list[str], length: int) -> str:
    return " ".join(rng.choice(vocab, size=length))


def random_corpus(rng: np.random.Generator, vocab: list[str], pairs: int, doc_sentences: int,
                  summary_sentences: int, sentence_length: int, copy_prob: float = 0.0) -> list[dict]:
    """Corpus records; each summary sentence is copied verbatim from the
    document with probability ``copy_prob``, otherwise drawn at random."""
    out = []
    for p in range(pairs):
        doc = [random_sentence(rng, vocab, sentence_length) for _ in range(doc_sentences)]
        summ = []
        for _ in range(summary_sentences):
            if rng.random() < copy_prob:
                summ.append(doc[int(rng.integers(doc_sentences))])
            else:
                summ.append(random_sentence(rng, vocab, sentence_length))
        out.append({"id": f"pair{p:05d}", "document": doc, "summary": summ})
    return out


def write_jsonl(path, records) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps(rec) + "\n")
